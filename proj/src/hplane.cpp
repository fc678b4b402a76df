#include "hyperbergman/hplane.hpp"

#include "hyperbergman/format.hpp"

namespace hyperbergman {

std::string to_string(const HPoint& p) {
    return "(" + fmt17(p.x()) + "," + fmt17(p.y()) + ")";
}

std::string to_string(const Mobius& t) {
    return "[" + fmt17(t.a()) + "," + fmt17(t.b()) + ";" + fmt17(t.c()) + "," + fmt17(t.d()) + "]";
}

}  // namespace hyperbergman
