#include <catch2/catch_amalgamated.hpp>

#include "qcarea/geometry.hpp"
#include "qcarea/rng.hpp"

using namespace qcarea;
using Catch::Matchers::WithinAbs;

namespace {

// Least-squares circle fit (Kasa): independent oracle for image circles.
struct FittedCircle {
    Cplx center;
    double radius;
};

FittedCircle fit_circle(const std::vector<Cplx>& pts) {
    double sxx = 0, sxy = 0, syy = 0, sx = 0, sy = 0, sxz = 0, syz = 0, sz = 0;
    const double n = static_cast<double>(pts.size());
    for (Cplx p : pts) {
        const double x = p.real(), y = p.imag(), z = x * x + y * y;
        sxx += x * x; sxy += x * y; syy += y * y;
        sx += x; sy += y;
        sxz += x * z; syz += y * z; sz += z;
    }
    // Normal equations for x^2 + y^2 + D x + E y + F = 0.
    double a[3][4] = {{sxx, sxy, sx, -sxz}, {sxy, syy, sy, -syz}, {sx, sy, n, -sz}};
    for (int col = 0; col < 3; ++col) {
        int pivot = col;
        for (int row = col + 1; row < 3; ++row)
            if (std::abs(a[row][col]) > std::abs(a[pivot][col])) pivot = row;
        std::swap(a[col], a[pivot]);
        for (int row = 0; row < 3; ++row) {
            if (row == col) continue;
            const double factor = a[row][col] / a[col][col];
            for (int k = col; k < 4; ++k) a[row][k] -= factor * a[col][k];
        }
    }
    const double d = a[0][3] / a[0][0], e = a[1][3] / a[1][1], f = a[2][3] / a[2][2];
    const Cplx center{-d / 2.0, -e / 2.0};
    return {center, std::sqrt(std::norm(center) - f)};
}

MobiusMap random_mobius(Rng& rng) {
    while (true) {
        const Cplx a{rng.uniform(-2, 2), rng.uniform(-2, 2)};
        const Cplx b{rng.uniform(-2, 2), rng.uniform(-2, 2)};
        const Cplx c{rng.uniform(-2, 2), rng.uniform(-2, 2)};
        const Cplx d{rng.uniform(-2, 2), rng.uniform(-2, 2)};
        if (std::abs(a * d - b * c) > 0.1) return {a, b, c, d};
    }
}

}  // namespace

TEST_CASE("mobius apply: fixed points, zeros and the pole") {
    const MobiusMap m = MobiusMap::disk_automorphism(0.5);
    REQUIRE_THAT(std::abs(m(Cplx{0.5, 0.0})), WithinAbs(0.0, 1e-15));
    REQUIRE_THAT(std::abs(m(Cplx{1.0, 0.0}) - 1.0), WithinAbs(0.0, 1e-15));

    const MobiusMap g0 = MobiusMap::pole_frame(0.5);
    REQUIRE(is_inf_point(g0(Cplx{2.0, 0.0})));
    REQUIRE_THAT(std::abs(g0(inf_point()) - Cplx{-2.0, 0.0}), WithinAbs(0.0, 1e-15));
}

TEST_CASE("mobius construction rejects degenerate coefficients") {
    REQUIRE_THROWS_AS(MobiusMap(1.0, 2.0, 2.0, 4.0), std::invalid_argument);
    REQUIRE_THROWS_AS(MobiusMap::disk_automorphism(1.0), std::invalid_argument);
    REQUIRE_THROWS_AS(MobiusMap::disk_automorphism(-0.1), std::invalid_argument);
}

TEST_CASE("group law and inverse round trip on random draws") {
    Rng rng(2024);
    for (int trial = 0; trial < 200; ++trial) {
        const MobiusMap m1 = random_mobius(rng);
        const MobiusMap m2 = random_mobius(rng);
        const MobiusMap m12 = compose(m1, m2);
        const Cplx z{rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5)};

        const Cplx via_compose = m12(z);
        const Cplx via_steps = m1(m2(z));
        if (is_finite_point(via_steps) && std::abs(via_steps) < 1e4)
            REQUIRE_THAT(std::abs(via_compose - via_steps),
                         WithinAbs(0.0, 1e-12 * std::max(1.0, std::abs(via_steps))));

        const Cplx back = m1.inverse()(m1(z));
        if (is_finite_point(back))
            REQUIRE_THAT(std::abs(back - z), WithinAbs(0.0, 1e-12 * std::max(1.0, std::abs(z))));
    }
}

TEST_CASE("image disk: unit-disk automorphism sends B(r) to the centered disk") {
    const Disk b = pseudo_disk(0.5, 0.6);
    const auto image = mobius_image_disk(MobiusMap::disk_automorphism(0.5), b);
    const Disk& d = std::get<Disk>(image);
    REQUIRE_THAT(std::abs(d.center), WithinAbs(0.0, 1e-14));
    REQUIRE_THAT(d.radius, WithinAbs(0.6, 1e-14));
}

TEST_CASE("image disk: pole frame sends B(r) to the shifted disk") {
    const Disk b = pseudo_disk(0.5, 0.6);
    const auto image = mobius_image_disk(MobiusMap::pole_frame(0.5), b);
    const Disk& d = std::get<Disk>(image);
    REQUIRE_THAT(d.center.real(), WithinAbs(0.5 / 0.75, 1e-13));  // p/(1-p^2) = 2/3
    REQUIRE_THAT(d.center.imag(), WithinAbs(0.0, 1e-13));
    REQUIRE_THAT(d.radius, WithinAbs(0.6 / 0.75, 1e-13));  // r/(1-p^2) = 0.8
}

TEST_CASE("image disk: identity fixes any disk; boundary pole gives a half plane") {
    const Disk d{Cplx{0.3, -0.2}, 0.7};
    const Disk& same = std::get<Disk>(mobius_image_disk(MobiusMap::identity(), d));
    REQUIRE_THAT(std::abs(same.center - d.center), WithinAbs(0.0, 1e-15));
    REQUIRE_THAT(same.radius, WithinAbs(d.radius, 1e-15));

    // 1/z on the circle through the origin |z - 1| = 1: the image is the
    // half plane Re w > 1/2.
    const auto image = mobius_image_disk(MobiusMap::inversion(), Disk{Cplx{1.0, 0.0}, 1.0});
    const HalfPlane& hp = std::get<HalfPlane>(image);
    REQUIRE_THAT(hp.boundary_point.real(), WithinAbs(0.5, 1e-12));
    REQUIRE(hp.contains(Cplx{2.0, 0.3}));
    REQUIRE_FALSE(hp.contains(Cplx{0.0, 0.0}));
}

TEST_CASE("circle preservation: 360 boundary points land on the image circle") {
    Rng rng(99);
    int accepted = 0;
    while (accepted < 100) {
        const MobiusMap m = random_mobius(rng);
        const Disk d{Cplx{rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5)}, rng.uniform(0.2, 1.5)};
        const Cplx pole = m.pole();
        if (is_finite_point(pole) && std::abs(std::abs(pole - d.center) - d.radius) < 0.1 * d.radius)
            continue;  // boundary-pole cases are the half-plane branch
        const auto image = mobius_image_disk(m, d);
        const Disk* circle = std::get_if<Disk>(&image);
        if (!circle) circle = &std::get<ExteriorRegion>(image).excluded;
        if (circle->radius > 1e3) continue;  // keep the absolute tolerance meaningful
        ++accepted;
        for (int s = 0; s < 360; ++s) {
            const Cplx w = m(d.boundary_point(2.0 * kPi * s / 360.0));
            REQUIRE_THAT(std::abs(std::abs(w - circle->center) - circle->radius),
                         WithinAbs(0.0, 1e-10));
        }
    }
}

TEST_CASE("pseudo disk: closed form and containment in the unit disk") {
    const Disk trivial = pseudo_disk(0.0, 0.6);
    REQUIRE_THAT(std::abs(trivial.center), WithinAbs(0.0, 1e-15));
    REQUIRE_THAT(trivial.radius, WithinAbs(0.6, 1e-15));

    const Disk b = pseudo_disk(0.5, 0.6);
    REQUIRE_THAT(b.center.real(), WithinAbs(0.35164835164835168, 1e-15));
    REQUIRE_THAT(b.radius, WithinAbs(0.49450549450549453, 1e-15));

    for (double p = 0.0; p < 0.95; p += 0.05)
        for (double r = 0.05; r < 0.99; r += 0.05) {
            const Disk d = pseudo_disk(p, r);
            REQUIRE(std::abs(d.center) + d.radius < 1.0);
        }

    REQUIRE_THROWS_AS(pseudo_disk(1.0, 0.5), std::invalid_argument);
    REQUIRE_THROWS_AS(pseudo_disk(0.5, 0.0), std::invalid_argument);
}

TEST_CASE("pseudo disk at r^(1/K) reproduces the inverse-family core disk") {
    // The core disk of the inverse family equals the direct family's disk at
    // the contracted radius, for every tested (p, r, K).
    for (double p : {0.0, 0.3, 0.6})
        for (double r : {0.3, 0.6, 0.9})
            for (double big_k : {1.2, 2.0, 3.0}) {
                const double s = std::pow(r, 1.0 / big_k);
                const Disk via_substitution = pseudo_disk(p, s);
                // Direct evaluation of the displayed center/radius for the
                // inverse family.
                const double den = 1.0 - p * p * std::pow(r, 2.0 / big_k);
                REQUIRE_THAT(via_substitution.center.real(),
                             WithinAbs(p * (1.0 - std::pow(r, 2.0 / big_k)) / den, 1e-14));
                REQUIRE_THAT(via_substitution.radius,
                             WithinAbs(std::pow(r, 1.0 / big_k) * (1.0 - p * p) / den, 1e-14));
            }
}

TEST_CASE("invert region: exterior mirror of B(r) and its frozen parameters") {
    // p = 0.5 < r = 0.6, so the origin lies inside B(r) and the mirror is an
    // exterior region with excluded disk center -0.32/0.11, radius 0.45/0.11.
    const auto mirror = invert_region(pseudo_disk(0.5, 0.6));
    const ExteriorRegion& ext = std::get<ExteriorRegion>(mirror);
    REQUIRE_THAT(ext.excluded.center.real(), WithinAbs(-2.909090909090909, 1e-12));
    REQUIRE_THAT(ext.excluded.center.imag(), WithinAbs(0.0, 1e-12));
    REQUIRE_THAT(ext.excluded.radius, WithinAbs(4.090909090909091, 1e-12));
}

TEST_CASE("invert region: centered disk and off-origin disk") {
    const auto centered = invert_region(Disk{0.0, 0.5});
    REQUIRE_THAT(std::get<ExteriorRegion>(centered).excluded.radius, WithinAbs(2.0, 1e-14));

    // Brute-force oracle: push 360 boundary samples of |z - 3| = 1 through
    // 1/z and fit a circle; the image must be the disk (3/8, 1/8).
    std::vector<Cplx> samples;
    const Disk d{Cplx{3.0, 0.0}, 1.0};
    for (int s = 0; s < 360; ++s) samples.push_back(1.0 / d.boundary_point(2.0 * kPi * s / 360.0));
    const FittedCircle fit = fit_circle(samples);
    REQUIRE_THAT(fit.center.real(), WithinAbs(0.375, 1e-12));
    REQUIRE_THAT(fit.center.imag(), WithinAbs(0.0, 1e-12));
    REQUIRE_THAT(fit.radius, WithinAbs(0.125, 1e-12));

    const auto image = invert_region(d);
    const Disk& got = std::get<Disk>(image);
    REQUIRE_THAT(std::abs(got.center - fit.center), WithinAbs(0.0, 1e-12));
    REQUIRE_THAT(got.radius, WithinAbs(fit.radius, 1e-12));
}

TEST_CASE("invert region: boundary pole is rejected") {
    REQUIRE_THROWS_AS(invert_region(Disk{Cplx{1.0, 0.0}, 1.0}), std::domain_error);
}

TEST_CASE("inversion is an involution where defined") {
    Rng rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        const Disk d{Cplx{rng.uniform(-2, 2), rng.uniform(-2, 2)}, rng.uniform(0.1, 1.0)};
        if (std::abs(std::abs(d.center) - d.radius) < 0.05) continue;
        const auto once = invert_region(d);
        Disk back{0.0, 1.0};
        if (const Disk* disk = std::get_if<Disk>(&once))
            back = std::get<Disk>(invert_region(*disk));
        else
            back = invert_region(std::get<ExteriorRegion>(once));
        REQUIRE_THAT(std::abs(back.center - d.center), WithinAbs(0.0, 1e-12));
        REQUIRE_THAT(back.radius, WithinAbs(d.radius, 1e-12));
    }
}
