#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <string>

#include "hyperbergman/error.hpp"

// Upper half-plane geometry. The kernel is templated on the scalar type so
// the same formulas can be replayed in extended precision by the oracles;
// production code uses the double instantiations below.
namespace hyperbergman {

/// A point x + iy of the upper half-plane, y > 0.
template <class Real>
class BasicHPoint {
public:
    BasicHPoint(Real x, Real y) : x_(x), y_(y) {
        using std::isfinite;
        if (!(y > Real(0)) || !isfinite(x) || !isfinite(y))
            throw Error(ErrorKind::Usage, "invalid-point", "upper half-plane point needs finite x and y > 0");
    }

    static BasicHPoint from_complex(const std::complex<Real>& z) { return {z.real(), z.imag()}; }

    Real x() const { return x_; }
    Real y() const { return y_; }
    std::complex<Real> z() const { return {x_, y_}; }

    friend bool operator==(const BasicHPoint&, const BasicHPoint&) = default;

private:
    Real x_;
    Real y_;
};

/// An element of PSL2(R) stored as a unit-determinant matrix [[a, b], [c, d]].
///
/// The matrix and its negation describe the same transform; the stored
/// representative has its first nonzero entry among (a, b, c) positive.
template <class Real>
class BasicMobius {
public:
    BasicMobius() : m_{Real(1), Real(0), Real(0), Real(1)} {}

    /// Rescales by 1/sqrt(det) and fixes the sign. Rejects det <= 0.
    BasicMobius(Real a, Real b, Real c, Real d) : m_{a, b, c, d} {
        using std::isfinite;
        using std::sqrt;
        const Real det = a * d - b * c;
        if (!(det > Real(0)) || !isfinite(det))
            throw Error(ErrorKind::Usage, "invalid-transform", "Mobius transform needs a positive finite determinant");
        const Real s = Real(1) / sqrt(det);
        for (auto& v : m_) v *= s;
        canonicalize_sign();
    }

    static BasicMobius identity() { return {}; }

    Real a() const { return m_[0]; }
    Real b() const { return m_[1]; }
    Real c() const { return m_[2]; }
    Real d() const { return m_[3]; }
    const std::array<Real, 4>& entries() const { return m_; }

    Real trace() const { return m_[0] + m_[3]; }

    /// Translation length 2 arccosh(|tr|/2); zero for elliptic and parabolic elements.
    Real translation_length() const {
        using std::abs;
        using std::acosh;
        const Real t = abs(trace());
        return t > Real(2) ? Real(2) * acosh(t / Real(2)) : Real(0);
    }

    friend bool operator==(const BasicMobius&, const BasicMobius&) = default;

private:
    void canonicalize_sign() {
        using std::abs;
        Real scale = Real(0);
        for (const auto& v : m_) scale = abs(v) > scale ? abs(v) : scale;
        const Real tiny = scale * Real(1e-14);
        for (int i = 0; i < 3; ++i) {
            if (abs(m_[i]) > tiny) {
                if (m_[i] < Real(0))
                    for (auto& v : m_) v = -v;
                return;
            }
        }
    }

    std::array<Real, 4> m_;
};

template <class Real>
BasicMobius<Real> compose(const BasicMobius<Real>& s, const BasicMobius<Real>& t) {
    return {s.a() * t.a() + s.b() * t.c(), s.a() * t.b() + s.b() * t.d(),
            s.c() * t.a() + s.d() * t.c(), s.c() * t.b() + s.d() * t.d()};
}

template <class Real>
BasicMobius<Real> inverse(const BasicMobius<Real>& t) {
    return {t.d(), -t.b(), -t.c(), t.a()};
}

/// (az + b) / (cz + d). Uses Im(tz) = y / |cz + d|^2, exact for unit determinant.
template <class Real>
BasicHPoint<Real> mobius_apply(const BasicMobius<Real>& t, const BasicHPoint<Real>& p) {
    using std::isfinite;
    const Real x = p.x(), y = p.y();
    const Real den_re = t.c() * x + t.d();
    const Real den_im = t.c() * y;
    const Real den = den_re * den_re + den_im * den_im;
    const Real num_re = t.a() * x + t.b();
    const Real nx = (num_re * den_re + t.a() * t.c() * y * y) / den;
    const Real ny = y / den;
    if (!(ny > Real(0)) || !isfinite(nx) || !isfinite(ny))
        throw Error(ErrorKind::Numerical, "degenerate-point", "image point left the upper half-plane numerically");
    return {nx, ny};
}

/// |z1 - z2|^2 / (4 y1 y2) = sinh^2(d/2); the quantity everything else is built from.
template <class Real>
Real half_sinh_sq_distance(const BasicHPoint<Real>& p, const BasicHPoint<Real>& q) {
    const Real dx = p.x() - q.x();
    const Real dy = p.y() - q.y();
    return (dx * dx + dy * dy) / (Real(4) * p.y() * q.y());
}

/// cosh d(z1, z2) = 1 + |z1 - z2|^2 / (2 y1 y2).
template <class Real>
Real cosh_distance(const BasicHPoint<Real>& p, const BasicHPoint<Real>& q) {
    return Real(1) + Real(2) * half_sinh_sq_distance(p, q);
}

/// d(z1, z2) = 2 asinh(|z1 - z2| / (2 sqrt(y1 y2))), stable for nearby points.
template <class Real>
Real hyp_distance(const BasicHPoint<Real>& p, const BasicHPoint<Real>& q) {
    using std::asinh;
    using std::sqrt;
    return Real(2) * asinh(sqrt(half_sinh_sq_distance(p, q)));
}

using HPoint = BasicHPoint<double>;
using Mobius = BasicMobius<double>;

std::string to_string(const HPoint& p);
std::string to_string(const Mobius& t);

}  // namespace hyperbergman
