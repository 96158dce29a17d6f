// Second-order dual numbers: carries f, df/dB, d2f/dB2 through arithmetic.
//
// Every closed-form expression in this library is templated on its scalar
// type, so evaluating it on Dual2 yields exact field-derivatives by the
// chain rule (no symbolic algebra, no finite differences in library code).
#pragma once

#include <cmath>

namespace isingcm {

struct Dual2 {
    double v = 0.0;   // value
    double d1 = 0.0;  // first derivative
    double d2 = 0.0;  // second derivative

    Dual2() = default;
    Dual2(double value) : v(value) {}  // constants have zero derivatives
    Dual2(double value, double first, double second) : v(value), d1(first), d2(second) {}

    // The independent variable: seed d/dB = 1.
    static Dual2 variable(double value) { return {value, 1.0, 0.0}; }

    Dual2 operator-() const { return {-v, -d1, -d2}; }
};

inline Dual2 operator+(const Dual2& a, const Dual2& b) { return {a.v + b.v, a.d1 + b.d1, a.d2 + b.d2}; }
inline Dual2 operator-(const Dual2& a, const Dual2& b) { return {a.v - b.v, a.d1 - b.d1, a.d2 - b.d2}; }

inline Dual2 operator*(const Dual2& a, const Dual2& b) {
    return {a.v * b.v,
            a.d1 * b.v + a.v * b.d1,
            a.d2 * b.v + 2.0 * a.d1 * b.d1 + a.v * b.d2};
}

inline Dual2 operator/(const Dual2& a, const Dual2& b) {
    // a * (1/b); (1/x)' = -1/x^2, (1/x)'' = 2/x^3.
    const double iv = 1.0 / b.v;
    const Dual2 inv{iv, -iv * iv * b.d1, 2.0 * iv * iv * iv * b.d1 * b.d1 - iv * iv * b.d2};
    return a * inv;
}

inline bool operator<(const Dual2& a, const Dual2& b) { return a.v < b.v; }
inline bool operator>(const Dual2& a, const Dual2& b) { return a.v > b.v; }
inline bool operator<=(const Dual2& a, const Dual2& b) { return a.v <= b.v; }
inline bool operator>=(const Dual2& a, const Dual2& b) { return a.v >= b.v; }
inline bool operator==(const Dual2& a, const Dual2& b) { return a.v == b.v; }

// Unary lift: g(u) with g' and g'' known at u.v.
inline Dual2 lift(double g, double g1, double g2, const Dual2& u) {
    return {g, g1 * u.d1, g2 * u.d1 * u.d1 + g1 * u.d2};
}

inline Dual2 exp(const Dual2& u) {
    const double e = std::exp(u.v);
    return lift(e, e, e, u);
}

inline Dual2 expm1(const Dual2& u) {
    const double e = std::exp(u.v);
    return lift(std::expm1(u.v), e, e, u);
}

inline Dual2 log(const Dual2& u) {
    const double i = 1.0 / u.v;
    return lift(std::log(u.v), i, -i * i, u);
}

inline Dual2 log1p(const Dual2& u) {
    const double i = 1.0 / (1.0 + u.v);
    return lift(std::log1p(u.v), i, -i * i, u);
}

inline Dual2 sqrt(const Dual2& u) {
    const double s = std::sqrt(u.v);
    return lift(s, 0.5 / s, -0.25 / (s * u.v), u);
}

inline Dual2 sinh(const Dual2& u) {
    const double s = std::sinh(u.v), c = std::cosh(u.v);
    return lift(s, c, s, u);
}

inline Dual2 cosh(const Dual2& u) {
    const double s = std::sinh(u.v), c = std::cosh(u.v);
    return lift(c, s, c, u);
}

inline Dual2 tanh(const Dual2& u) {
    const double t = std::tanh(u.v), sech2 = 1.0 - t * t;
    return lift(t, sech2, -2.0 * t * sech2, u);
}

// Integer power by squaring; keeps x^n exact at x = 0 (n >= 1).
template <class T>
T pow_int(T x, unsigned long long n) {
    T result(1.0);
    while (n > 0) {
        if (n & 1ull) result = result * x;
        x = x * x;
        n >>= 1;
    }
    return result;
}

// Plain value extraction, usable in code templated on double | Dual2.
inline double value_of(double x) { return x; }
inline long double value_of(long double x) { return x; }
inline double value_of(const Dual2& x) { return x.v; }

} // namespace isingcm
