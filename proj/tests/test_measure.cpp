#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "qcarea/measure.hpp"

using namespace qcarea;
using Catch::Matchers::WithinAbs;

namespace {

QuadSpec quick_mc(std::size_t samples = 200'000, std::uint64_t seed = 7) {
    return QuadSpec{QuadMethod::montecarlo, samples, seed, 128};
}

}  // namespace

TEST_CASE("area: exact closed forms") {
    REQUIRE_THAT(area(Region{Disk{0.0, 0.5}}).value, WithinAbs(kPi / 4.0, 1e-15));

    // B(0.5, 0.6) has radius 0.45/0.91.
    const Estimate b_area = area(Region{pseudo_disk(0.5, 0.6)});
    REQUIRE(b_area.exact);
    REQUIRE_THAT(b_area.value, WithinAbs(0.76823150869693652, 1e-14));

    // closure(D) minus B0(r): pi - pi R0^2.
    const Disk b0 = pseudo_disk(0.4, std::pow(0.6, 1.0 / 1.5));
    const Estimate diff = area(Region{DiskDiff{Disk{0.0, 1.0}, b0}});
    REQUIRE(diff.exact);
    REQUIRE_THAT(diff.value, WithinAbs(kPi * (1.0 - b0.radius * b0.radius), 1e-14));

    // Scaling: |Disk(c, 2R)| = 4 |Disk(c, R)| exactly.
    const Disk small{Cplx{0.3, -1.0}, 0.37};
    REQUIRE(area(Region{Disk{small.center, 2.0 * small.radius}}).value ==
            4.0 * area(Region{small}).value);
}

TEST_CASE("area: overlapping unions by inclusion-exclusion, Monte Carlo fallback") {
    const Disk a{Cplx{0.0, 0.0}, 0.5}, b{Cplx{0.6, 0.0}, 0.5};
    const Estimate two = area(Region{DiskUnion{{a, b}}});
    REQUIRE(two.exact);
    const Estimate mc = detail::mc_region_integral(Region{DiskUnion{{a, b}}},
                                                   [](Cplx) { return 1.0; }, quick_mc(400'000));
    REQUIRE_THAT(mc.value, WithinAbs(two.value, 4.0 * mc.std_error));

    // Three disks with a common point fall back to Monte Carlo.
    const Disk c{Cplx{0.3, 0.4}, 0.5};
    const Estimate three = area(Region{DiskUnion{{a, b, c}}}, quick_mc(400'000));
    REQUIRE_FALSE(three.exact);
    REQUIRE(three.std_error > 0.0);

    // Three pairwise-disjoint disks stay exact.
    const Estimate disjoint = area(
        Region{DiskUnion{{Disk{Cplx{-1.0, 0.0}, 0.2}, Disk{Cplx{1.0, 0.0}, 0.2},
                          Disk{Cplx{0.0, 1.0}, 0.2}}}});
    REQUIRE(disjoint.exact);
    REQUIRE_THAT(disjoint.value, WithinAbs(3.0 * kPi * 0.04, 1e-14));
}

TEST_CASE("area: grid masks count cells; exterior requires a clip") {
    GridMask mask;
    mask.rows = mask.cols = 4;
    mask.x0 = mask.y0 = 0.0;
    mask.h = 0.25;
    mask.bits = {1, 1, 0, 0, 1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1};
    REQUIRE_THAT(area(Region{mask}).value, WithinAbs(5.0 * 0.0625, 1e-15));

    const ExteriorRegion unclipped{Disk{0.0, 1.0}, std::nullopt};
    REQUIRE_THROWS_AS(Region{unclipped}, std::invalid_argument);
    const Region clipped{ExteriorRegion{Disk{0.0, 1.0}, Disk{0.0, 2.0}}};
    REQUIRE_THAT(area(clipped).value, WithinAbs(kPi * 3.0, 1e-13));
}

TEST_CASE("grid mask round trip through the text format") {
    GridMask mask;
    mask.rows = 2;
    mask.cols = 3;
    mask.x0 = -0.5;
    mask.y0 = -0.25;
    mask.h = 0.125;
    mask.bits = {1, 0, 1, 0, 1, 0};
    std::stringstream buffer;
    write_grid_mask(buffer, mask);
    const GridMask back = read_grid_mask(buffer);
    REQUIRE(back.rows == mask.rows);
    REQUIRE(back.cols == mask.cols);
    REQUIRE(back.bits == mask.bits);
    REQUIRE(back.contains(Cplx{-0.45, -0.2}));
    REQUIRE_FALSE(back.contains(Cplx{-0.3, -0.2}));

    std::stringstream bad("2 3 0 0 0.5\n10\n");
    REQUIRE_THROWS_AS(read_grid_mask(bad), std::runtime_error);
}

TEST_CASE("pushforward: identity map reproduces the area") {
    const PiecewiseQCMap id = radial_stretch(0.5, 1.0);
    const Region e{Disk{Cplx{0.2, 0.1}, 0.4}};
    const Estimate est = pushforward_area_quad(id, e, quick_mc());
    REQUIRE_THAT(est.value, WithinAbs(kPi * 0.16, std::max(3.0 * est.std_error, 1e-9)));
}

TEST_CASE("pushforward: pole stretch core disk matches the closed form") {
    const double p = 0.5, r = 0.6, big_k = 2.0;
    const PiecewiseQCMap g = pole_stretch(DistortionParams::from_K(big_k, p, r));
    const Region core{pseudo_disk(p, r)};
    const double closed = kPi * std::pow(r, 2.0 / big_k) / std::pow(1.0 - p * p, 2.0);

    const Estimate exact = pushforward_area(g, core, quick_mc());
    REQUIRE(exact.exact);
    REQUIRE_THAT(exact.value, WithinAbs(closed, 1e-12));
    REQUIRE_THAT(exact.value, WithinAbs(3.3510321638291128, 1e-12));

    const Estimate mc = pushforward_area_quad(g, core, quick_mc(1'000'000));
    REQUIRE_FALSE(mc.exact);
    REQUIRE_THAT(mc.value, WithinAbs(closed, std::max(3.0 * mc.std_error, 0.005 * closed)));
}

TEST_CASE("pushforward: inverse stretch on the residual annulus") {
    const double p = 0.4, r = 0.9, big_k = 2.0;
    const PiecewiseQCMap h = inverse_stretch(DistortionParams::from_K(big_k, p, r));
    const Region annulus{DiskDiff{Disk{0.0, 1.0}, pseudo_disk(p, std::pow(r, 1.0 / big_k))}};
    const double closed = kPi * std::pow(1.0 - p * p, -2.0) * (1.0 - r * r);
    const Estimate mc = pushforward_area_quad(h, annulus, quick_mc(1'000'000));
    REQUIRE_THAT(mc.value, WithinAbs(closed, std::max(3.0 * mc.std_error, 0.005 * closed)));
    REQUIRE(pushforward_area(h, annulus, quick_mc()).exact);
}

TEST_CASE("pushforward: sampling the map's pole neighborhood is rejected") {
    const PiecewiseQCMap g = pole_stretch(DistortionParams::from_K(2.0, 0.5, 0.6));
    REQUIRE_THROWS_AS(pushforward_area_quad(g, Region{Disk{Cplx{2.0, 0.0}, 0.5}}, quick_mc()),
                      std::domain_error);
    QuadSpec zero = quick_mc();
    zero.samples = 0;
    REQUIRE_THROWS_AS(pushforward_area_quad(g, Region{Disk{0.0, 0.3}}, zero),
                      std::invalid_argument);
}

TEST_CASE("reference area: exact disk images in the g0 frame") {
    const double p = 0.5, r = 0.6;
    const Estimate core = reference_area(Region{pseudo_disk(p, r)}, p, Frame::g0);
    REQUIRE(core.exact);
    REQUIRE_THAT(core.value, WithinAbs(kPi * r * r / std::pow(1.0 - p * p, 2.0), 1e-13));

    const double big_k = 2.0;
    const Estimate annulus = reference_area(
        Region{DiskDiff{Disk{0.0, 1.0}, pseudo_disk(p, std::pow(r, 1.0 / big_k))}}, p, Frame::g0);
    REQUIRE(annulus.exact);
    REQUIRE_THAT(annulus.value,
                 WithinAbs(kPi * std::pow(1.0 - p * p, -2.0) * (1.0 - std::pow(r, 2.0 / big_k)),
                           1e-13));
}

TEST_CASE("reference area: mirrored exterior set in the f0 frame") {
    // |f0(Btilde(r))| = |g0(B(r))| = pi r^2 (1-p^2)^-2 via the inversion
    // device; cross-checked by Monte Carlo on the mirrored disk.
    const double p = 0.5, r = 0.6;
    const auto mirror = invert_region(pseudo_disk(p, r));
    const ExteriorRegion& btilde = std::get<ExteriorRegion>(mirror);
    const Estimate exact = reference_area(btilde, p, Frame::f0);
    REQUIRE(exact.exact);
    const double closed = kPi * r * r / std::pow(1.0 - p * p, 2.0);
    REQUIRE_THAT(exact.value, WithinAbs(closed, 1e-12));

    const MobiusMap g0 = MobiusMap::pole_frame(p);
    const Estimate mc = detail::mc_region_integral(
        Region{pseudo_disk(p, r)}, [&](Cplx z) { return std::norm(g0.derivative(z)); },
        quick_mc(400'000));
    REQUIRE_THAT(mc.value, WithinAbs(closed, 3.0 * mc.std_error));
}

TEST_CASE("mirror identity: the two reference frames agree boundary to boundary") {
    // f0(1/zeta) = g0(zeta) pointwise, so the boundary circle of the
    // exterior mirror must land exactly on the g0 image circle of B(r).
    const double p = 0.5, r = 0.6;
    const Disk b = pseudo_disk(p, r);
    const ExteriorRegion btilde = std::get<ExteriorRegion>(invert_region(b));
    const Disk image = std::get<Disk>(mobius_image_disk(MobiusMap::pole_frame(p), b));
    const MobiusMap f0 = MobiusMap::reciprocal_frame(p);
    for (int s = 0; s < 360; ++s) {
        const Cplx w = f0(btilde.excluded.boundary_point(2.0 * kPi * s / 360.0));
        REQUIRE_THAT(std::abs(std::abs(w - image.center) - image.radius), WithinAbs(0.0, 1e-10));
    }
    REQUIRE(image.contains(f0(Cplx{10.0, 3.0})));  // deep exterior maps inside
}

TEST_CASE("reference area: pole margin is enforced") {
    // In the f0 frame the pole sits at p; a region reaching it is rejected.
    REQUIRE_THROWS_AS(
        reference_area(Region{DiskUnion{{Disk{Cplx{0.5, 0.0}, 0.2}}}}, 0.5, Frame::f0, quick_mc()),
        std::domain_error);
}

TEST_CASE("weighted pushforward: unit and zero weights, negative rejection") {
    const PiecewiseQCMap g = pole_stretch(DistortionParams::from_K(2.0, 0.4, 0.6));
    const Region e{Disk{Cplx{-0.2, 0.3}, 0.3}};
    const QuadSpec q = quick_mc();

    const Estimate plain = pushforward_area_quad(g, e, q);
    const Estimate unit = weighted_pushforward(g, e, [](Cplx) { return 1.0; }, 1.0, q);
    REQUIRE(unit.value == plain.value);  // same seed, same draws

    const Estimate zero = weighted_pushforward(g, e, [](Cplx) { return 0.0; }, 2.0, q);
    REQUIRE(zero.value == 0.0);

    REQUIRE_THROWS_AS(weighted_pushforward(g, e, [](Cplx z) { return z.real(); }, 1.0, q),
                      std::domain_error);
}

TEST_CASE("weighted pushforward: stacked weight on a conformal annulus") {
    // With the piecewise-constant stack weight, the weighted Jacobian
    // integral over annulus j contributes w_j^K |g0(E~_j)| = pi p_j (1-p^2)^-2.
    const double p = 0.4, big_k = 2.0;
    const std::vector<double> radii{0.7, 0.7};
    const auto pw = feasible_pweights(radii);
    const StackedFamily family = stacked_map(p, big_k, radii, pw);
    auto stack_weight = [&family](Cplx z) -> double {
        for (std::size_t j = 0; j < family.annuli.size(); ++j)
            if (family.annuli[j].contains(z)) return family.weights[j];
        return 0.0;
    };
    for (std::size_t j = 0; j < family.annuli.size(); ++j) {
        const Estimate est = weighted_pushforward(family.map, family.annuli[j], stack_weight, 1.0,
                                                  quick_mc(400'000, 21 + j));
        const double expect =
            std::pow(family.weights[j], big_k) * kPi * pw[j] * std::pow(1.0 - p * p, -2.0);
        REQUIRE_THAT(est.value, WithinAbs(expect, std::max(3.0 * est.std_error, 1e-4 * expect)));
    }
}

TEST_CASE("conformal consistency: quadrature matches the exact image disk") {
    // K = 1 pole stretch is the Mobius frame itself; its pushforward must
    // match the image-disk area from the generalized-circle geometry.
    const double p = 0.3;
    const PiecewiseQCMap frame = pole_stretch(DistortionParams::from_K(1.0, p, 0.5));
    const Disk e{Cplx{0.1, -0.2}, 0.35};
    const Estimate mc = pushforward_area_quad(frame, Region{e}, quick_mc(400'000));
    const Disk image = std::get<Disk>(mobius_image_disk(MobiusMap::pole_frame(p), e));
    REQUIRE_THAT(mc.value, WithinAbs(image.area(), 3.0 * mc.std_error));
}

TEST_CASE("additivity over disjoint regions within combined error") {
    const PiecewiseQCMap g = pole_stretch(DistortionParams::from_K(1.8, 0.2, 0.5));
    const Disk e1{Cplx{-0.4, 0.0}, 0.2}, e2{Cplx{0.45, 0.3}, 0.25};
    const Estimate whole = pushforward_area_quad(g, Region{DiskUnion{{e1, e2}}}, quick_mc(400'000));
    const Estimate part1 = pushforward_area_quad(g, Region{e1}, quick_mc(400'000, 8));
    const Estimate part2 = pushforward_area_quad(g, Region{e2}, quick_mc(400'000, 9));
    const double combined = std::sqrt(whole.std_error * whole.std_error +
                                      part1.std_error * part1.std_error +
                                      part2.std_error * part2.std_error);
    REQUIRE_THAT(whole.value, WithinAbs(part1.value + part2.value, 3.0 * combined));
}

TEST_CASE("seeded determinism: identical QuadSpec reproduces bit-identical estimates") {
    const PiecewiseQCMap g = pole_stretch(DistortionParams::from_K(2.0, 0.4, 0.6));
    const Region e{Disk{Cplx{0.2, 0.2}, 0.3}};
    const Estimate a = pushforward_area_quad(g, e, quick_mc(100'000, 1234));
    const Estimate b = pushforward_area_quad(g, e, quick_mc(100'000, 1234));
    REQUIRE(a.value == b.value);
    REQUIRE(a.std_error == b.std_error);
    const Estimate c = pushforward_area_quad(g, e, quick_mc(100'000, 1235));
    REQUIRE(a.value != c.value);
}

TEST_CASE("tensor grid quadrature agrees with closed forms") {
    QuadSpec q{QuadMethod::tensorgrid, 0, 0, 256};
    REQUIRE_THAT(detail::region_integral(Region{Disk{Cplx{0.3, 0.1}, 0.5}},
                                         [](Cplx) { return 1.0; }, q)
                     .value,
                 WithinAbs(kPi * 0.25, 1e-12));
    const PiecewiseQCMap g = pole_stretch(DistortionParams::from_K(2.0, 0.5, 0.6));
    const Region core{pseudo_disk(0.5, 0.6)};
    const double closed = kPi * 0.6 / std::pow(0.75, 2.0);
    const Estimate tensor = pushforward_area_quad(g, core, q);
    REQUIRE_THAT(tensor.value, WithinAbs(closed, 2e-4 * closed));
}
