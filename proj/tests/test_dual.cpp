#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "isingcm/dual.hpp"
#include "test_util.hpp"

using isingcm::Dual2;
using testutil::close_rel;

namespace {

// Composite expression exercising every lifted primitive.
template <class T>
T composite(T x) {
    using std::exp;
    using std::log;
    using std::log1p;
    using std::expm1;
    using std::sqrt;
    using std::sinh;
    using std::cosh;
    using std::tanh;
    T a = exp(sinh(x) * T(0.5)) + cosh(x);
    T b = sqrt(a + T(2.0)) / (T(1.0) + x * x);
    T c = log(a) + log1p(x * x) - expm1(T(-0.3) * x);
    return b * c + tanh(x) / a;
}

} // namespace

TEST_CASE("dual arithmetic matches finite differences on a composite") {
    for (double x : {-1.7, -0.4, 0.0, 0.3, 1.1, 2.5}) {
        const Dual2 r = composite(Dual2::variable(x));
        const auto f = [](long double t) { return composite<long double>(t); };
        CHECK(close_rel(r.v, static_cast<double>(f(x)), 1e-14));
        CHECK(close_rel(r.d1, static_cast<double>(testutil::richardson_d1(f, x)), 1e-9));
        CHECK(close_rel(r.d2, static_cast<double>(testutil::richardson_d2(f, x)), 1e-8));
    }
}

TEST_CASE("dual division quotient rule") {
    const Dual2 x = Dual2::variable(0.7);
    const Dual2 q = sinh(x) / cosh(x);
    const Dual2 t = tanh(x);
    CHECK(close_rel(q.v, t.v, 1e-15));
    CHECK(close_rel(q.d1, t.d1, 1e-14));
    CHECK(close_rel(q.d2, t.d2, 1e-13));
}

TEST_CASE("pow_int at zero base keeps derivatives exact") {
    const Dual2 x = Dual2::variable(0.0);
    const Dual2 sq = isingcm::pow_int(x, 2);
    CHECK(sq.v == 0.0);
    CHECK(sq.d1 == 0.0);
    CHECK(sq.d2 == 2.0);
    const Dual2 cube = isingcm::pow_int(x, 3);
    CHECK(cube.v == 0.0);
    CHECK(cube.d1 == 0.0);
    CHECK(cube.d2 == 0.0);
    CHECK(isingcm::pow_int(Dual2::variable(1.5), 0).v == 1.0);
}

TEST_CASE("pow_int agrees with std::pow away from zero") {
    for (double x : {0.2, 0.9, 1.3}) {
        for (unsigned n : {1u, 2u, 5u, 13u}) {
            const Dual2 r = isingcm::pow_int(Dual2::variable(x), n);
            CHECK(close_rel(r.v, std::pow(x, n), 1e-13));
            CHECK(close_rel(r.d1, n * std::pow(x, n - 1.0), 1e-12));
            CHECK(close_rel(r.d2, n * (n - 1.0) * std::pow(x, n - 2.0), 1e-12));
        }
    }
}

TEST_CASE("constants carry zero derivatives") {
    const Dual2 c(3.25);
    CHECK(c.d1 == 0.0);
    CHECK(c.d2 == 0.0);
    const Dual2 s = c + Dual2::variable(1.0) * Dual2(2.0);
    CHECK(s.d1 == 2.0);
    CHECK(s.d2 == 0.0);
}
