#pragma once

#include <chrono>
#include <sstream>
#include <string>
#include <vector>

#include "qcarea/beltrami.hpp"
#include "qcarea/extremal_maps.hpp"
#include "qcarea/measure.hpp"
#include "qcarea/transforms.hpp"

namespace qcarea {

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

/// One verification row. Equality checks pass when |ratio - 1| stays within
/// max(1%, 3 combined standard errors); inequality checks pass when
/// lhs <= rhs + 3 combined standard errors. Runtime is informational and not
/// serialized, so identical inputs produce identical output files.
struct DistortionReport {
    std::string theorem;
    double p = 0.0, r = 0.0, big_k = 1.0, k = 0.0;
    std::size_t grid_n = 0;
    double window = 0.0;
    std::size_t samples = 0;
    std::uint64_t seed = 0;
    double lhs = 0.0, rhs = 0.0, ratio = 0.0, std_error = 0.0;
    std::string mode;  // "equality" | "inequality"
    bool pass = false;
    double runtime_s = 0.0;
    std::string set_primal, set_mirror;
    std::string note;
};

namespace detail {

inline DistortionReport finish_equality(DistortionReport rep, double lhs, double rhs, double se,
                                        double tol = 0.01) {
    rep.lhs = lhs;
    rep.rhs = rhs;
    rep.ratio = rhs == 0.0 ? (lhs == 0.0 ? 1.0 : std::numeric_limits<double>::infinity())
                           : lhs / rhs;
    rep.std_error = se;
    rep.mode = "equality";
    const double eps = std::max(tol, rhs == 0.0 ? tol : 3.0 * se / std::abs(rhs));
    rep.pass = std::abs(rep.ratio - 1.0) <= eps;
    return rep;
}

inline DistortionReport finish_inequality(DistortionReport rep, double lhs, double rhs,
                                          double se) {
    rep.lhs = lhs;
    rep.rhs = rhs;
    rep.ratio = rhs == 0.0 ? (lhs == 0.0 ? 1.0 : std::numeric_limits<double>::infinity())
                           : lhs / rhs;
    rep.std_error = se;
    rep.mode = "inequality";
    rep.pass = lhs <= rhs + 3.0 * se;
    return rep;
}

class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

inline std::string mirror_description(const Region& region) {
    return "preimage under z -> 1/z of " + region.describe();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// th1i — conformal-core area bound: |f(E)| <= [pi (1-p^2)^-2]^(1-1/K) |f0(E)|^(1/K)
// Verified in the mirrored disk frame, where the closed forms live.
// ---------------------------------------------------------------------------

/// General form: g conformal on E' inside the unit disk.
inline DistortionReport verify_th1_i_region(const PiecewiseQCMap& g, const Region& eprime,
                                            double p, double big_k, const QuadSpec& q,
                                            bool equality_family) {
    detail::Stopwatch timer;
    DistortionReport rep;
    rep.theorem = "th1i";
    rep.p = p;
    rep.r = g.params().r();
    rep.big_k = big_k;
    rep.k = (big_k - 1.0) / (big_k + 1.0);
    rep.samples = q.samples;
    rep.seed = q.seed;
    rep.set_mirror = eprime.describe();
    rep.set_primal = detail::mirror_description(eprime);

    const Estimate lhs = pushforward_area_quad(g, eprime, q);
    const Estimate ref = reference_area(eprime, p, Frame::g0, q);
    const double cap = kPi / ((1.0 - p * p) * (1.0 - p * p));
    const double rhs = std::pow(cap, 1.0 - 1.0 / big_k) * std::pow(ref.value, 1.0 / big_k);
    double rhs_se = 0.0;
    if (!ref.exact && ref.value > 0.0)
        rhs_se = rhs * ref.std_error / (big_k * ref.value);
    const double se = std::sqrt(lhs.std_error * lhs.std_error + rhs_se * rhs_se);

    rep = equality_family ? detail::finish_equality(std::move(rep), lhs.value, rhs, se)
                          : detail::finish_inequality(std::move(rep), lhs.value, rhs, se);
    rep.runtime_s = timer.seconds();
    return rep;
}

/// Extremal family: the pole stretch on its conformal core disk; the two
/// sides agree at pi r^(2/K) (1-p^2)^-2.
inline DistortionReport verify_th1_i(double p, double r, double big_k, const QuadSpec& q) {
    auto params = DistortionParams::from_K(big_k, p, r);
    PiecewiseQCMap g = pole_stretch(params);
    Region eprime{pseudo_disk(p, r)};
    return verify_th1_i_region(g, eprime, p, big_k, q, /*equality_family=*/true);
}

// ---------------------------------------------------------------------------
// th1ii — compact-set area bound: |f(E)| <= K |f0(E)| for f conformal outside compact E
// ---------------------------------------------------------------------------

inline DistortionReport verify_th1_ii_region(const PiecewiseQCMap& h, const Region& eprime,
                                             double p, double big_k, const QuadSpec& q,
                                             bool equality_family) {
    detail::Stopwatch timer;
    DistortionReport rep;
    rep.theorem = "th1ii";
    rep.p = p;
    rep.r = h.params().r();
    rep.big_k = big_k;
    rep.k = (big_k - 1.0) / (big_k + 1.0);
    rep.samples = q.samples;
    rep.seed = q.seed;
    rep.set_mirror = eprime.describe();
    rep.set_primal = detail::mirror_description(eprime);

    const Estimate lhs = pushforward_area_quad(h, eprime, q);
    const Estimate ref = reference_area(eprime, p, Frame::g0, q);
    const double rhs = big_k * ref.value;
    const double rhs_se = ref.exact ? 0.0 : big_k * ref.std_error;
    const double se = std::sqrt(lhs.std_error * lhs.std_error + rhs_se * rhs_se);

    rep = equality_family ? detail::finish_equality(std::move(rep), lhs.value, rhs, se)
                          : detail::finish_inequality(std::move(rep), lhs.value, rhs, se);
    rep.runtime_s = timer.seconds();
    return rep;
}

/// Sharpness family: the inverse stretch outside E' = closed unit disk minus
/// B0(r); the ratio (1-r^2)/(K(1-r^(2/K))) increases to 1 as r -> 1.
inline DistortionReport verify_th1_ii(double p, double r, double big_k, const QuadSpec& q) {
    auto params = DistortionParams::from_K(big_k, p, r);
    PiecewiseQCMap h = inverse_stretch(params);
    Region eprime{DiskDiff{Disk{0.0, 1.0}, pseudo_disk(p, std::pow(r, 1.0 / big_k))}};
    DistortionReport rep = verify_th1_ii_region(h, eprime, p, big_k, q, /*equality_family=*/false);
    std::ostringstream note;
    note << "sharpness ratio (1-r^2)/(K(1-r^(2/K))) = "
         << (1.0 - r * r) / (big_k * (1.0 - std::pow(r, 2.0 / big_k)));
    rep.note = note.str();
    return rep;
}

// ---------------------------------------------------------------------------
// th1iii — unconditional area bound: |f(E)| <= K [pi (1-p^2)^-2]^(1-1/K) |f0(E)|^(1/K), any E
// ---------------------------------------------------------------------------

inline DistortionReport verify_th1_iii_region(const PiecewiseQCMap& g, const Region& eprime,
                                              double p, double big_k, const QuadSpec& q) {
    detail::Stopwatch timer;
    DistortionReport rep;
    rep.theorem = "th1iii";
    rep.p = p;
    rep.r = g.params().r();
    rep.big_k = big_k;
    rep.k = (big_k - 1.0) / (big_k + 1.0);
    rep.samples = q.samples;
    rep.seed = q.seed;
    rep.set_mirror = eprime.describe();
    rep.set_primal = detail::mirror_description(eprime);

    const Estimate lhs = pushforward_area_quad(g, eprime, q);
    const Estimate ref = reference_area(eprime, p, Frame::g0, q);
    const double cap = kPi / ((1.0 - p * p) * (1.0 - p * p));
    const double rhs =
        big_k * std::pow(cap, 1.0 - 1.0 / big_k) * std::pow(ref.value, 1.0 / big_k);
    double rhs_se = 0.0;
    if (!ref.exact && ref.value > 0.0)
        rhs_se = rhs * ref.std_error / (big_k * ref.value);
    const double se = std::sqrt(lhs.std_error * lhs.std_error + rhs_se * rhs_se);
    rep = detail::finish_inequality(std::move(rep), lhs.value, rhs, se);
    rep.runtime_s = timer.seconds();
    return rep;
}

inline DistortionReport verify_th1_iii(double p, double r, double big_k, const QuadSpec& q) {
    auto params = DistortionParams::from_K(big_k, p, r);
    PiecewiseQCMap g = pole_stretch(params);
    Region eprime{pseudo_disk(p, r)};
    DistortionReport rep = verify_th1_iii_region(g, eprime, p, big_k, q);
    rep.note = "extremal of part (i): expected slack factor 1/K";
    return rep;
}

// ---------------------------------------------------------------------------
// Grid-based pushforward for solved Beltrami fields
// ---------------------------------------------------------------------------

namespace detail {

/// Coverage-weighted cell sum of the discrete Jacobian |dg|^2 - |w|^2 over a
/// region. The returned std_error is a boundary-cell resolution proxy.
inline Estimate solution_pushforward(const BeltramiSolution& sol, const Region& region,
                                     std::size_t subdiv = 4) {
    const GridSpec& grid = sol.w.grid;
    const double h = grid.spacing();
    const double sub = static_cast<double>(subdiv * subdiv);
    double acc = 0.0, boundary_abs = 0.0;
    for (std::size_t i = 0; i < grid.n; ++i)
        for (std::size_t j = 0; j < grid.n; ++j) {
            const Cplx z = grid.point(i, j);
            // Quick reject: cell centers farther than one cell diagonal away
            // from the region need no subsampling.
            if (!region.contains(z) && region.distance_to(z) > 1.5 * h) continue;
            std::size_t hits = 0;
            const Cplx base = z - Cplx{0.5 * h, 0.5 * h};
            const double step = h / static_cast<double>(subdiv);
            for (std::size_t a = 0; a < subdiv; ++a)
                for (std::size_t b = 0; b < subdiv; ++b)
                    if (region.contains(base + Cplx{(b + 0.5) * step, (a + 0.5) * step})) ++hits;
            if (hits == 0) continue;
            const double coverage = static_cast<double>(hits) / sub;
            const double jac = std::norm(sol.dg.at(i, j)) - std::norm(sol.w.at(i, j));
            acc += jac * coverage * h * h;
            if (hits < subdiv * subdiv) boundary_abs += std::abs(jac) * h * h;
        }
    return {acc, boundary_abs / (2.0 * static_cast<double>(subdiv)), grid.size(), false};
}

}  // namespace detail

/// Unconditional area bound (th1iii) against a solved Beltrami field: the left side is the
/// coverage-weighted Jacobian sum of the reconstructed map over E'.
inline DistortionReport verify_th1_iii_solution(const BeltramiSolution& sol, double k, double p,
                                                const Region& eprime, const QuadSpec& q) {
    detail::Stopwatch timer;
    const double big_k = (1.0 + k) / (1.0 - k);
    DistortionReport rep;
    rep.theorem = "th1iii";
    rep.p = p;
    rep.big_k = big_k;
    rep.k = k;
    rep.grid_n = sol.w.grid.n;
    rep.window = sol.w.grid.half_width;
    rep.samples = q.samples;
    rep.seed = q.seed;
    rep.set_mirror = eprime.describe();
    rep.set_primal = detail::mirror_description(eprime);
    rep.note = "solved dilatation field";

    const Estimate lhs = detail::solution_pushforward(sol, eprime);
    const Estimate ref = reference_area(eprime, p, Frame::g0, q);
    const double cap = kPi / ((1.0 - p * p) * (1.0 - p * p));
    const double rhs =
        big_k * std::pow(cap, 1.0 - 1.0 / big_k) * std::pow(ref.value, 1.0 / big_k);
    double rhs_se = 0.0;
    if (!ref.exact && ref.value > 0.0)
        rhs_se = rhs * ref.std_error / (big_k * ref.value);
    const double se = std::sqrt(lhs.std_error * lhs.std_error + rhs_se * rhs_se);
    rep = detail::finish_inequality(std::move(rep), lhs.value, rhs, se);
    rep.runtime_s = timer.seconds();
    return rep;
}

// ---------------------------------------------------------------------------
// th2 — weighted area bounds (two-sided)
// ---------------------------------------------------------------------------

struct Th2Reports {
    DistortionReport lower;  // [pi(1-p^2)^-2]^(1-K) (int w^(1/K) J0)^K <= int w J_f
    DistortionReport upper;  // int w J_f <= [pi(1-p^2)^-2]^(1-1/K) (int w^K J0)^(1/K)
};

namespace detail {

inline Th2Reports finish_th2(DistortionReport base, double mid, double mid_se, double low_int,
                             double low_se, double up_int, double up_se, double p, double big_k,
                             bool equality_family) {
    const double cap = kPi / ((1.0 - p * p) * (1.0 - p * p));

    const double lower_bound = std::pow(cap, 1.0 - big_k) * std::pow(low_int, big_k);
    double lower_se = 0.0;
    if (low_int > 0.0) lower_se = lower_bound * big_k * low_se / low_int;

    const double upper_bound = std::pow(cap, 1.0 - 1.0 / big_k) * std::pow(up_int, 1.0 / big_k);
    double upper_se = 0.0;
    if (up_int > 0.0) upper_se = upper_bound * up_se / (big_k * up_int);

    Th2Reports out{base, base};
    out.lower.theorem = "th2-lower";
    out.lower = finish_inequality(std::move(out.lower), lower_bound, mid,
                                  std::sqrt(lower_se * lower_se + mid_se * mid_se));
    out.upper.theorem = "th2-upper";
    out.upper = equality_family
                    ? finish_equality(std::move(out.upper), mid, upper_bound,
                                      std::sqrt(upper_se * upper_se + mid_se * mid_se))
                    : finish_inequality(std::move(out.upper), mid, upper_bound,
                                        std::sqrt(upper_se * upper_se + mid_se * mid_se));
    return out;
}

}  // namespace detail

/// Equality family: the stacked construction with weight W0 = sum w_j on the
/// conformal annuli. The middle integral and the upper bound both equal
/// pi (1-p^2)^-2.
inline Th2Reports verify_th2_stacked(double p, double big_k, const std::vector<double>& radii,
                                     const std::vector<double>& pweights, const QuadSpec& q) {
    detail::Stopwatch timer;
    StackedFamily family = stacked_map(p, big_k, radii, pweights);

    DistortionReport base;
    base.p = p;
    base.r = radii.front();
    base.big_k = big_k;
    base.k = (big_k - 1.0) / (big_k + 1.0);
    base.samples = q.samples;
    base.seed = q.seed;
    base.set_mirror = "stack of " + std::to_string(radii.size()) + " conformal annuli";
    base.set_primal = "mirrored stack under z -> 1/z";
    base.note = "stacked equality family";

    // Piecewise-constant weight: integrate annulus by annulus.
    double mid = 0.0, mid_var = 0.0;
    double low_int = 0.0, low_var = 0.0;
    double up_int = 0.0, up_var = 0.0;
    QuadSpec qj = q;
    for (std::size_t j = 0; j < family.annuli.size(); ++j) {
        qj.seed = q.seed + 101 * (j + 1);
        const double wj = family.weights[j];
        const Estimate push = pushforward_area_quad(family.map, family.annuli[j], qj);
        mid += wj * push.value;
        mid_var += wj * wj * push.std_error * push.std_error;

        const Estimate ref = reference_area(family.annuli[j], p, Frame::g0, qj);
        low_int += std::pow(wj, 1.0 / big_k) * ref.value;
        up_int += std::pow(wj, big_k) * ref.value;
        if (!ref.exact) {
            low_var += std::pow(wj, 2.0 / big_k) * ref.std_error * ref.std_error;
            up_var += std::pow(wj, 2.0 * big_k) * ref.std_error * ref.std_error;
        }
    }

    Th2Reports out = detail::finish_th2(std::move(base), mid, std::sqrt(mid_var), low_int,
                                        std::sqrt(low_var), up_int, std::sqrt(up_var), p, big_k,
                                        /*equality_family=*/true);
    out.lower.runtime_s = out.upper.runtime_s = timer.seconds();
    return out;
}

/// Both weighted bounds for a solved Beltrami field conformal on E', with an
/// arbitrary nonnegative weight rule.
inline Th2Reports verify_th2_solution(const BeltramiSolution& sol, double k, double p,
                                      const Region& eprime,
                                      const std::function<double(Cplx)>& weight,
                                      const QuadSpec& q) {
    detail::Stopwatch timer;
    const double big_k = (1.0 + k) / (1.0 - k);

    DistortionReport base;
    base.p = p;
    base.big_k = big_k;
    base.k = k;
    base.grid_n = sol.w.grid.n;
    base.window = sol.w.grid.half_width;
    base.samples = q.samples;
    base.seed = q.seed;
    base.set_mirror = eprime.describe();
    base.set_primal = detail::mirror_description(eprime);
    base.note = "solved dilatation field, random weight";

    // Middle integral from the grid fields, coverage weighted.
    const GridSpec& grid = sol.w.grid;
    const double h = grid.spacing();
    const std::size_t subdiv = 4;
    double mid = 0.0, boundary_abs = 0.0;
    for (std::size_t i = 0; i < grid.n; ++i)
        for (std::size_t j = 0; j < grid.n; ++j) {
            const Cplx z = grid.point(i, j);
            if (!eprime.contains(z) && eprime.distance_to(z) > 1.5 * h) continue;
            std::size_t hits = 0;
            const Cplx base_pt = z - Cplx{0.5 * h, 0.5 * h};
            const double step = h / static_cast<double>(subdiv);
            for (std::size_t a = 0; a < subdiv; ++a)
                for (std::size_t b = 0; b < subdiv; ++b)
                    if (eprime.contains(base_pt + Cplx{(b + 0.5) * step, (a + 0.5) * step}))
                        ++hits;
            if (hits == 0) continue;
            const double coverage = static_cast<double>(hits) / (subdiv * subdiv);
            const double wv = weight(z);
            if (wv < 0.0) throw std::domain_error("verify_th2_solution: negative weight");
            const double jac = std::norm(sol.dg.at(i, j)) - std::norm(sol.w.at(i, j));
            mid += wv * jac * coverage * h * h;
            if (hits < subdiv * subdiv) boundary_abs += std::abs(wv * jac) * h * h;
        }
    const double mid_se = boundary_abs / (2.0 * subdiv);

    QuadSpec q_low = q, q_up = q;
    q_low.seed = q.seed + 11;
    q_up.seed = q.seed + 12;
    const Estimate low = weighted_reference(eprime, p, Frame::g0, weight, 1.0 / big_k, q_low);
    const Estimate up = weighted_reference(eprime, p, Frame::g0, weight, big_k, q_up);

    Th2Reports out = detail::finish_th2(std::move(base), mid, mid_se, low.value, low.std_error,
                                        up.value, up.std_error, p, big_k,
                                        /*equality_family=*/false);
    out.lower.runtime_s = out.upper.runtime_s = timer.seconds();
    return out;
}

// ---------------------------------------------------------------------------
// th3 — Hilbert-transform bound
// ---------------------------------------------------------------------------

namespace detail {

/// Coverage fraction of the intersection of the unit disk with the
/// complement (or interior) of E over a grid cell.
inline double cell_coverage(const GridSpec& grid, std::size_t i, std::size_t j,
                            const std::function<bool(Cplx)>& member, std::size_t subdiv = 4) {
    const double h = grid.spacing();
    const Cplx base = grid.point(i, j) - Cplx{0.5 * h, 0.5 * h};
    const double step = h / static_cast<double>(subdiv);
    std::size_t hits = 0;
    for (std::size_t a = 0; a < subdiv; ++a)
        for (std::size_t b = 0; b < subdiv; ++b)
            if (member(base + Cplx{(b + 0.5) * step, (a + 0.5) * step})) ++hits;
    return static_cast<double>(hits) / static_cast<double>(subdiv * subdiv);
}

inline DistortionReport verify_th3_impl(double p, const std::function<bool(Cplx)>& e_member,
                                        double g0_area_of_e, const GridSpec& grid,
                                        bool equality_family, double tol) {
    detail::Stopwatch timer;
    DistortionReport rep;
    rep.theorem = "th3";
    rep.p = p;
    rep.grid_n = grid.n;
    rep.window = grid.half_width;

    // chi_E (1 - p conj(z))^-2, cell averaged across the indicator jump.
    auto rule = [&](Cplx z) -> Cplx {
        if (!e_member(z)) return 0.0;
        const Cplx den = 1.0 - p * std::conj(z);
        return 1.0 / (den * den);
    };
    ComplexField density = sample_averaged(rule, grid, 4, Disk{0.0, 1.0});
    ComplexField transformed = hilbert(density);

    const Disk unit{0.0, 1.0};
    auto complement_member = [&](Cplx z) { return unit.contains(z) && !e_member(z); };
    double lhs = 0.0;
    const double h = grid.spacing();
    for (std::size_t i = 0; i < grid.n; ++i)
        for (std::size_t j = 0; j < grid.n; ++j) {
            const Cplx z = grid.point(i, j);
            if (std::abs(z) > 1.0 + 2.0 * h) continue;
            const double coverage = cell_coverage(grid, i, j, complement_member);
            if (coverage == 0.0) continue;
            const double weight = 1.0 / std::norm(1.0 - p * z);
            lhs += weight * std::abs(transformed.at(i, j)) * coverage * h * h;
        }

    const double cap = kPi / ((1.0 - p * p) * (1.0 - p * p));
    const double rhs =
        g0_area_of_e <= 0.0 ? 0.0 : g0_area_of_e * std::log(cap / g0_area_of_e);
    rep = equality_family ? detail::finish_equality(std::move(rep), lhs, rhs, 0.0, tol)
                          : detail::finish_inequality(std::move(rep), lhs,
                                                      rhs + tol * std::abs(rhs), 0.0);
    rep.runtime_s = timer.seconds();
    return rep;
}

}  // namespace detail

/// Sharpness family: E = B(r), where the bound is met with value
/// 2 pi (1-p^2)^-2 r^2 log(1/r). Grid accuracy target 2%.
inline DistortionReport verify_th3(double p, double r, const GridSpec& grid) {
    const Disk e = pseudo_disk(p, r);
    const double g0_area = kPi * r * r / ((1.0 - p * p) * (1.0 - p * p));
    DistortionReport rep = detail::verify_th3_impl(
        p, [e](Cplx z) { return e.contains_closed(z); }, g0_area, grid,
        /*equality_family=*/true, 0.02);
    rep.r = r;
    rep.set_mirror = Region{e}.describe();
    rep.set_primal = "unit disk minus " + Region{e}.describe();
    rep.note = "sharpness family";
    return rep;
}

/// Inequality for an arbitrary raster set E inside the unit disk.
inline DistortionReport verify_th3_mask(double p, const GridMask& mask, const GridSpec& grid) {
    Region e{mask};
    const double g0_area =
        reference_area(e, p, Frame::g0, QuadSpec{QuadMethod::tensorgrid, 0, 0, 8}).value;
    DistortionReport rep = detail::verify_th3_impl(
        p, [&e](Cplx z) { return e.contains(z); }, g0_area, grid,
        /*equality_family=*/false, 0.02);
    rep.set_mirror = e.describe();
    rep.set_primal = "unit disk minus raster set";
    return rep;
}

// ---------------------------------------------------------------------------
// Parameter sweeps
// ---------------------------------------------------------------------------

struct SweepSpec {
    std::string theorem;  // th1i | th1ii | th1iii | th2 | th3
    std::vector<double> ps, rs, big_ks;
    QuadSpec quad;
    std::size_t grid_n = 512;
    double window = 4.0;
};

/// One report per grid point, in deterministic (p, r, K) order. A point that
/// throws yields a failed report carrying the error text; for the part (ii)
/// sharpness family the ratio must also increase monotonically along r.
inline std::vector<DistortionReport> sweep(const SweepSpec& spec) {
    std::vector<DistortionReport> reports;
    for (double p : spec.ps)
        for (double r : spec.rs)
            for (double big_k : spec.big_ks) {
                try {
                    if (spec.theorem == "th1i") {
                        reports.push_back(verify_th1_i(p, r, big_k, spec.quad));
                    } else if (spec.theorem == "th1ii") {
                        reports.push_back(verify_th1_ii(p, r, big_k, spec.quad));
                    } else if (spec.theorem == "th1iii") {
                        reports.push_back(verify_th1_iii(p, r, big_k, spec.quad));
                    } else if (spec.theorem == "th2") {
                        std::vector<double> radii{r, r};
                        Th2Reports pair =
                            verify_th2_stacked(p, big_k, radii, feasible_pweights(radii), spec.quad);
                        reports.push_back(pair.lower);
                        reports.push_back(pair.upper);
                    } else if (spec.theorem == "th3") {
                        reports.push_back(verify_th3(p, r, GridSpec{spec.window, spec.grid_n}));
                    } else {
                        throw std::invalid_argument("sweep: unknown theorem id " + spec.theorem);
                    }
                } catch (const std::exception& err) {
                    DistortionReport rep;
                    rep.theorem = spec.theorem;
                    rep.p = p;
                    rep.r = r;
                    rep.big_k = big_k;
                    rep.pass = false;
                    rep.mode = "error";
                    rep.note = err.what();
                    reports.push_back(std::move(rep));
                }
            }

    if (spec.theorem == "th1ii" && spec.rs.size() > 1) {
        // The sharpness ratio must approach 1 monotonically as r -> 1.
        for (std::size_t pi = 0; pi < spec.ps.size(); ++pi)
            for (std::size_t ki = 0; ki < spec.big_ks.size(); ++ki) {
                double prev = -1.0;
                for (std::size_t ri = 0; ri < spec.rs.size(); ++ri) {
                    auto& rep =
                        reports[(pi * spec.rs.size() + ri) * spec.big_ks.size() + ki];
                    if (rep.mode == "error") continue;
                    if (rep.ratio <= prev) {
                        rep.pass = false;
                        rep.note += "; sharpness ratio not increasing along r";
                    }
                    prev = rep.ratio;
                }
            }
    }
    return reports;
}

// ---------------------------------------------------------------------------
// Randomized configurations for the property suite
// ---------------------------------------------------------------------------

/// Union of 1..3 disks inside the annulus 0.1 <= |z| <= 0.9 (mirrored frame),
/// kept clear of both frame poles.
inline Region random_region(Rng& rng) {
    const int count = 1 + static_cast<int>(rng.uniform() * 3.0);
    std::vector<Disk> disks;
    for (int i = 0; i < count; ++i) {
        const double rho = rng.uniform(0.25, 0.75);
        const double theta = rng.uniform(0.0, 2.0 * kPi);
        const Cplx center = rho * Cplx{std::cos(theta), std::sin(theta)};
        const double max_radius = std::min(std::abs(center) - 0.1, 0.9 - std::abs(center));
        disks.push_back(Disk{center, rng.uniform(0.05, std::max(0.06, max_radius))});
    }
    if (disks.size() == 1) return Region{disks.front()};
    return Region{DiskUnion{std::move(disks)}};
}

/// Smooth random dilatation with |mu| <= k, supported in the unit disk and
/// vanishing (with a mollified collar) on an optional conformal hole.
inline ComplexField random_mu_field(const GridSpec& grid, double k, Rng& rng,
                                    const Region* conformal_hole = nullptr,
                                    double collar = 0.05) {
    struct Bump {
        Cplx center;
        double sigma;
        Cplx amp;
    };
    std::vector<Bump> bumps;
    for (int i = 0; i < 4; ++i) {
        const double rho = rng.uniform(0.0, 0.7);
        const double theta = rng.uniform(0.0, 2.0 * kPi);
        bumps.push_back({rho * Cplx{std::cos(theta), std::sin(theta)}, rng.uniform(0.12, 0.35),
                         Cplx{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)}});
    }
    auto smoothstep = [](double t) {
        t = std::clamp(t, 0.0, 1.0);
        return t * t * (3.0 - 2.0 * t);
    };
    auto raw = [&](Cplx z) -> Cplx {
        Cplx acc{0.0, 0.0};
        for (const auto& b : bumps) {
            const double d2 = std::norm(z - b.center);
            acc += b.amp * std::exp(-d2 / (b.sigma * b.sigma));
        }
        acc *= smoothstep((1.0 - std::abs(z)) / 0.08);
        if (conformal_hole)
            acc *= smoothstep((conformal_hole->distance_to(z) - collar) / collar);
        return acc;
    };

    ComplexField mu(grid, Disk{0.0, 1.0});
    double max_abs = 0.0;
    for (std::size_t i = 0; i < grid.n; ++i)
        for (std::size_t j = 0; j < grid.n; ++j) {
            const Cplx v = raw(grid.point(i, j));
            mu.at(i, j) = v;
            max_abs = std::max(max_abs, std::abs(v));
        }
    if (max_abs > 0.0) {
        const double scale = k / max_abs;
        for (auto& v : mu.values) v *= scale;
    }
    return mu;
}

/// Smooth strictly nonnegative random weight for the weighted bounds.
inline std::function<double(Cplx)> random_weight(Rng& rng) {
    const double a = rng.uniform(0.2, 2.0);
    const double b = rng.uniform(0.0, 2.0);
    const Cplx c{rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)};
    return [a, b, c](Cplx z) { return a + b * std::norm(z - c); };
}

// ---------------------------------------------------------------------------
// Transform calibration checks
// ---------------------------------------------------------------------------

/// Relative L2 error of hilbert() against the closed form
///   H[chi_B(r) (1 - p conj(z))^-2] = -r^2 (z - p)^-2 off B(r),
/// measured over the window minus a 4h collar around the jump circle.
inline double hilbert_closed_form_error(double p, double r, const GridSpec& grid) {
    const Disk e = pseudo_disk(p, r);
    Th3Witness witness = th3_witness(p, r);
    ComplexField density = sample_averaged(
        [&witness](Cplx z) { return witness.dbar_rule(z); }, grid, 4, Disk{0.0, 1.0});
    ComplexField transformed = hilbert(density);
    ComplexField expected = sample([&witness](Cplx z) { return witness.d_rule(z); }, grid);
    const double collar = 4.0 * grid.spacing();
    Mask mask = mask_where(grid, [&](Cplx z) { return std::abs(e.boundary_distance(z)) > collar; });
    return relative_l2_error(transformed, expected, mask);
}

/// Smooth compactly supported random bump field (sum of Gaussians, mollified
/// to vanish at the unit circle).
inline ComplexField random_bump_field(const GridSpec& grid, std::uint64_t seed) {
    Rng rng(seed);
    return random_mu_field(grid, 1.0, rng);
}

/// ||H f||_2 / ||f||_2 for one random bump field.
inline double hilbert_isometry_ratio(const GridSpec& grid, std::uint64_t seed) {
    ComplexField f = random_bump_field(grid, seed);
    const double denom = l2_norm(f);
    if (denom == 0.0) return 1.0;
    return l2_norm(hilbert(f)) / denom;
}

}  // namespace qcarea
