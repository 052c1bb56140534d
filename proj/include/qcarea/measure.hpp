#pragma once

#include <cmath>
#include <cstdint>
#include <functional>

#include "qcarea/extremal_maps.hpp"
#include "qcarea/geometry.hpp"
#include "qcarea/region.hpp"
#include "qcarea/rng.hpp"

namespace qcarea {

enum class QuadMethod { montecarlo, tensorgrid };

struct QuadSpec {
    QuadMethod method = QuadMethod::montecarlo;
    std::size_t samples = 1'000'000;
    std::uint64_t seed = 7;
    std::size_t grid_n = 256;  // per-axis resolution for tensorgrid
};

struct Estimate {
    double value = 0.0;
    double std_error = 0.0;
    std::size_t samples = 0;
    bool exact = false;
};

namespace detail {

inline constexpr std::size_t kChunk = 1 << 16;

/// Chunked Monte Carlo over a region's uniform proposal. Substream seeds and
/// a fixed reduction order make the estimate a pure function of (region,
/// integrand, spec), independent of any scheduling.
template <typename F>
Estimate mc_region_integral(const Region& region, F&& integrand, const QuadSpec& q) {
    if (q.samples == 0) throw std::invalid_argument("quadrature: zero sample budget");
    const double proposal = region.proposal_area();
    double sum = 0.0, sum_sq = 0.0;
    std::size_t drawn = 0;
    for (std::size_t chunk = 0; drawn < q.samples; ++chunk) {
        Rng rng = Rng::substream(q.seed, chunk);
        const std::size_t todo = std::min(kChunk, q.samples - drawn);
        double local = 0.0, local_sq = 0.0;
        for (std::size_t i = 0; i < todo; ++i) {
            double weight = 0.0;
            const Cplx z = region.sample(rng, weight);
            const double v = weight == 0.0 ? 0.0 : weight * integrand(z);
            local += v;
            local_sq += v * v;
        }
        sum += local;
        sum_sq += local_sq;
        drawn += todo;
    }
    const double n = static_cast<double>(q.samples);
    const double mean = sum / n;
    const double var = std::max(0.0, sum_sq / n - mean * mean);
    return {proposal * mean, proposal * std::sqrt(var / n), q.samples, false};
}

/// Midpoint tensor rule in (squared radius, angle) over the region's annular
/// proposal; falls back to cell midpoints for rasters.
template <typename F>
Estimate tensor_region_integral(const Region& region, F&& integrand, const QuadSpec& q) {
    const std::size_t m = std::max<std::size_t>(q.grid_n, 8);
    auto polar_sum = [&](Cplx center, double r_in, double r_out, auto&& member) {
        const double u0 = r_in * r_in, u1 = r_out * r_out;
        const double du = (u1 - u0) / static_cast<double>(m);
        const double dth = 2.0 * kPi / static_cast<double>(m);
        double acc = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double rho = std::sqrt(u0 + (i + 0.5) * du);
            for (std::size_t j = 0; j < m; ++j) {
                const double th = (j + 0.5) * dth;
                const Cplx z = center + rho * Cplx{std::cos(th), std::sin(th)};
                const double w = member(z);
                if (w != 0.0) acc += w * integrand(z);
            }
        }
        return acc * 0.5 * du * dth;
    };

    return std::visit(
        [&](const auto& r) -> Estimate {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, Disk>) {
                double v = polar_sum(r.center, 0.0, r.radius, [](Cplx) { return 1.0; });
                return {v, 0.0, m * m, false};
            } else if constexpr (std::is_same_v<T, DiskDiff>) {
                double v = polar_sum(r.outer.center, 0.0, r.outer.radius, [&](Cplx z) {
                    return r.inner.contains_closed(z) ? 0.0 : 1.0;
                });
                return {v, 0.0, m * m, false};
            } else if constexpr (std::is_same_v<T, ClippedExterior>) {
                double v = polar_sum(r.clip.center, 0.0, r.clip.radius, [&](Cplx z) {
                    return r.excluded.contains_closed(z) ? 0.0 : 1.0;
                });
                return {v, 0.0, m * m, false};
            } else if constexpr (std::is_same_v<T, DiskUnion>) {
                double v = 0.0;
                for (const auto& d : r.disks)
                    v += polar_sum(d.center, 0.0, d.radius, [&](Cplx z) {
                        int mult = 0;
                        for (const auto& other : r.disks) mult += other.contains(z) ? 1 : 0;
                        return mult > 0 ? 1.0 / mult : 1.0;
                    });
                return {v, 0.0, r.disks.size() * m * m, false};
            } else {
                double acc = 0.0;
                for (std::size_t i = 0; i < r.rows; ++i)
                    for (std::size_t j = 0; j < r.cols; ++j)
                        if (r.at(i, j))
                            acc += integrand(Cplx{r.x0 + (j + 0.5) * r.h, r.y0 + (i + 0.5) * r.h});
                return {acc * r.h * r.h, 0.0, r.count(), false};
            }
        },
        region.variant());
}

template <typename F>
Estimate region_integral(const Region& region, F&& integrand, const QuadSpec& q) {
    if (std::holds_alternative<GridMask>(region.variant()) || q.method == QuadMethod::tensorgrid)
        return tensor_region_integral(region, integrand, q);
    return mc_region_integral(region, integrand, q);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Area functionals
// ---------------------------------------------------------------------------

/// |E|: closed form where available, Monte Carlo with a standard error
/// otherwise (only a triple-overlapping disk union lacks a closed form here).
inline Estimate area(const Region& region, const QuadSpec& q = {}) {
    if (auto exact = region.exact_area()) return {*exact, 0.0, 0, true};
    return detail::mc_region_integral(region, [](Cplx) { return 1.0; }, q);
}

/// |f(E)| = integral of the Jacobian of f over E, from the map's analytic
/// branch jets. Always quadrature; see pushforward_area for the closed-form
/// shortcut.
inline Estimate pushforward_area_quad(const PiecewiseQCMap& f, const Region& region,
                                      const QuadSpec& q) {
    if (f.pole() && region.distance_to(*f.pole()) < 1e-3)
        throw std::domain_error("pushforward_area: region too close to the map's pole");
    return detail::region_integral(region, [&](Cplx z) { return f.jet(z).jacobian(); }, q);
}

/// |f(E)| with the exact image-disk area returned when E is one of the map's
/// full branch regions with a closed-form image.
inline Estimate pushforward_area(const PiecewiseQCMap& f, const Region& region,
                                 const QuadSpec& q) {
    if (auto exact = f.exact_image_area(region)) return {*exact, 0.0, 0, true};
    return pushforward_area_quad(f, region, q);
}

// ---------------------------------------------------------------------------
// Reference areas |f0(E)|, |g0(E)|
// ---------------------------------------------------------------------------

/// The two conformal reference frames: f0(z) = 1/(z - p) on the mirrored
/// exterior side, g0(z) = z/(1 - pz) on the disk side.
enum class Frame { f0, g0 };

namespace detail {

inline MobiusMap frame_map(Frame frame, double p) {
    return frame == Frame::f0 ? MobiusMap::reciprocal_frame(p) : MobiusMap::pole_frame(p);
}

inline Cplx frame_pole(Frame frame, double p) {
    if (frame == Frame::f0) return {p, 0.0};
    return p == 0.0 ? inf_point() : Cplx{1.0 / p, 0.0};
}

/// Exact area of m(outer \ inner) for inner contained in outer and the pole
/// of m off the closed region.
inline std::optional<double> mobius_annulus_area(const MobiusMap& m, const Disk& outer,
                                                 const Disk& inner) {
    if (lens_area(outer, inner) < inner.area() - 1e-15 * inner.area()) return std::nullopt;
    const Cplx pole = m.pole();
    auto disk_image_area = [&](const Disk& d) -> double {
        const GeneralizedDisk img = mobius_image_disk(m, d);
        if (const auto* disk = std::get_if<Disk>(&img)) return disk->area();
        return std::get<ExteriorRegion>(img).excluded.area();
    };
    if (is_inf_point(pole) || !outer.contains_closed(pole))
        return disk_image_area(outer) - disk_image_area(inner);
    if (inner.contains(pole))
        return disk_image_area(inner) - disk_image_area(outer);
    return std::nullopt;  // pole inside the annulus itself: image unbounded
}

inline std::optional<double> mobius_region_area(const MobiusMap& m, const Region& region) {
    if (const auto* d = std::get_if<Disk>(&region.variant())) {
        const Cplx pole = m.pole();
        if (!is_inf_point(pole) && d->contains_closed(pole)) return std::nullopt;
        return std::get<Disk>(mobius_image_disk(m, *d)).area();
    }
    if (const auto* dd = std::get_if<DiskDiff>(&region.variant()))
        return mobius_annulus_area(m, dd->outer, dd->inner);
    if (const auto* ce = std::get_if<ClippedExterior>(&region.variant()))
        return mobius_annulus_area(m, ce->clip, ce->excluded);
    return std::nullopt;
}

}  // namespace detail

/// |f0(E)| or |g0(E)|: exact via the image disk for disk-type regions, else
/// quadrature of the frame Jacobian (|z-p|^-4 resp. |1-pz|^-4) with a 1e-3
/// pole margin.
inline Estimate reference_area(const Region& region, double p, Frame frame,
                               const QuadSpec& q = {}) {
    const MobiusMap m = detail::frame_map(frame, p);
    if (auto exact = detail::mobius_region_area(m, region)) return {*exact, 0.0, 0, true};

    const Cplx pole = detail::frame_pole(frame, p);
    if (is_finite_point(pole) && region.distance_to(pole) < 1e-3)
        throw std::domain_error("reference_area: region within 1e-3 of the frame pole");
    auto jac = [&m](Cplx z) {
        const Cplx dw = m.derivative(z);
        return std::norm(dw);
    };
    return detail::region_integral(region, jac, q);
}

/// Reference area of an unbounded exterior set, computed exactly on the
/// bounded mirror under z -> 1/z (which swaps the two frames).
inline Estimate reference_area(const ExteriorRegion& region, double p, Frame frame,
                               const QuadSpec& q = {}) {
    const Disk mirror = invert_region(region);
    const Frame flipped = frame == Frame::f0 ? Frame::g0 : Frame::f0;
    return reference_area(Region{mirror}, p, flipped, q);
}

// ---------------------------------------------------------------------------
// Weighted pushforward
// ---------------------------------------------------------------------------

/// integral over E of w(z)^power * J_f(z) dm. Throws if a negative weight
/// sample is seen.
inline Estimate weighted_pushforward(const PiecewiseQCMap& f, const Region& region,
                                     const std::function<double(Cplx)>& weight_rule, double power,
                                     const QuadSpec& q) {
    auto integrand = [&](Cplx z) {
        const double w = weight_rule(z);
        if (w < 0.0) throw std::domain_error("weighted_pushforward: negative weight sample");
        const double wp = power == 1.0 ? w : std::pow(w, power);
        return wp * f.jet(z).jacobian();
    };
    return detail::region_integral(region, integrand, q);
}

/// Same weighted integral against a reference frame's Jacobian instead of a
/// map's (the right-hand sides of the weighted-area bounds).
inline Estimate weighted_reference(const Region& region, double p, Frame frame,
                                   const std::function<double(Cplx)>& weight_rule, double power,
                                   const QuadSpec& q) {
    const MobiusMap m = detail::frame_map(frame, p);
    const Cplx pole = detail::frame_pole(frame, p);
    if (is_finite_point(pole) && region.distance_to(pole) < 1e-3)
        throw std::domain_error("weighted_reference: region within 1e-3 of the frame pole");
    auto integrand = [&](Cplx z) {
        const double w = weight_rule(z);
        if (w < 0.0) throw std::domain_error("weighted_reference: negative weight sample");
        const double wp = power == 1.0 ? w : std::pow(w, power);
        return wp * std::norm(m.derivative(z));
    };
    return detail::region_integral(region, integrand, q);
}

}  // namespace qcarea
