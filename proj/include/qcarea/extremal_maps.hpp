#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "qcarea/geometry.hpp"
#include "qcarea/region.hpp"

namespace qcarea {

// ---------------------------------------------------------------------------
// Distortion parameters
// ---------------------------------------------------------------------------

/// (k, p, r) with k the dilatation bound in [0,1), p the pole location in
/// [0,1) and r the critical radius in (0,1). K = (1+k)/(1-k) is derived from
/// the stored k, never stored separately.
class DistortionParams {
public:
    static DistortionParams from_k(double k, double p, double r) {
        if (!(k >= 0.0 && k < 1.0)) throw std::invalid_argument("DistortionParams: k must be in [0, 1)");
        return DistortionParams(k, p, r);
    }
    static DistortionParams from_K(double big_k, double p, double r) {
        if (!(big_k >= 1.0)) throw std::invalid_argument("DistortionParams: K must be >= 1");
        return DistortionParams((big_k - 1.0) / (big_k + 1.0), p, r);
    }

    double k() const { return k_; }
    double K() const { return (1.0 + k_) / (1.0 - k_); }
    double p() const { return p_; }
    double r() const { return r_; }

private:
    DistortionParams(double k, double p, double r) : k_(k), p_(p), r_(r) {
        if (!(p >= 0.0 && p < 1.0)) throw std::invalid_argument("DistortionParams: p must be in [0, 1)");
        if (!(r > 0.0 && r < 1.0)) throw std::invalid_argument("DistortionParams: r must be in (0, 1)");
    }
    double k_, p_, r_;
};

// ---------------------------------------------------------------------------
// First-order Wirtinger jets and piecewise maps
// ---------------------------------------------------------------------------

/// Value together with the Wirtinger derivatives (d = df/dz, dbar = df/dzbar).
struct MapJet {
    Cplx value;
    Cplx d;
    Cplx dbar;

    double jacobian() const { return std::norm(d) - std::norm(dbar); }
    Cplx dilatation() const { return dbar / d; }
};

/// Chain rule for outer(inner(z)): `outer` evaluated at inner.value.
inline MapJet compose_jet(const MapJet& outer, const MapJet& inner) {
    return {outer.value,
            outer.d * inner.d + outer.dbar * std::conj(inner.dbar),
            outer.d * inner.dbar + outer.dbar * std::conj(inner.d)};
}

struct MapBranch {
    std::function<bool(Cplx)> contains;
    std::function<MapJet(Cplx)> jet;
    bool conformal = false;
    std::string label;
};

struct ClosedFormImage {
    Region domain;
    double image_area;
};

/// A map given by ordered branches (first match wins; inner regions own their
/// boundaries). Branches carry analytic Wirtinger jets; seam circles support
/// the collar guards used by finite differences and grid sampling.
class PiecewiseQCMap {
public:
    PiecewiseQCMap(std::vector<MapBranch> branches, std::vector<Disk> seams,
                   DistortionParams params, std::optional<Cplx> pole = std::nullopt,
                   std::vector<ClosedFormImage> images = {})
        : branches_(std::move(branches)),
          seams_(std::move(seams)),
          params_(params),
          pole_(pole),
          images_(std::move(images)) {
        if (branches_.empty()) throw std::invalid_argument("PiecewiseQCMap: no branches");
    }

    Cplx operator()(Cplx z) const { return jet(z).value; }

    MapJet jet(Cplx z) const { return branch_at(z).jet(z); }

    const MapBranch& branch_at(Cplx z) const {
        for (const auto& b : branches_)
            if (b.contains(z)) return b;
        throw std::domain_error("PiecewiseQCMap: point not covered by any branch");
    }

    bool conformal_at(Cplx z) const { return branch_at(z).conformal; }

    /// Distance from z to the nearest branch-boundary circle.
    double seam_distance(Cplx z) const {
        double dist = std::numeric_limits<double>::infinity();
        for (const auto& s : seams_) dist = std::min(dist, std::abs(s.boundary_distance(z)));
        return dist;
    }

    const std::vector<Disk>& seams() const { return seams_; }
    const DistortionParams& params() const { return params_; }
    std::optional<Cplx> pole() const { return pole_; }

    /// Closed-form image area when the queried region is (structurally) one
    /// of the map's full branch regions.
    std::optional<double> exact_image_area(const Region& region) const {
        for (const auto& entry : images_)
            if (region_equal(entry.domain, region)) return entry.image_area;
        return std::nullopt;
    }

private:
    static bool disk_equal(const Disk& a, const Disk& b) {
        return std::abs(a.center - b.center) <= 1e-12 && std::abs(a.radius - b.radius) <= 1e-12;
    }
    static bool region_equal(const Region& a, const Region& b) {
        if (a.variant().index() != b.variant().index()) return false;
        if (const auto* da = std::get_if<Disk>(&a.variant()))
            return disk_equal(*da, std::get<Disk>(b.variant()));
        if (const auto* dd = std::get_if<DiskDiff>(&a.variant())) {
            const auto& other = std::get<DiskDiff>(b.variant());
            return disk_equal(dd->outer, other.outer) && disk_equal(dd->inner, other.inner);
        }
        return false;
    }

    std::vector<MapBranch> branches_;
    std::vector<Disk> seams_;
    DistortionParams params_;
    std::optional<Cplx> pole_;
    std::vector<ClosedFormImage> images_;
};

// ---------------------------------------------------------------------------
// Building blocks
// ---------------------------------------------------------------------------

namespace detail {

/// Radial power map on the unit disk: w -> s^(e-1) w for |w| <= s,
/// w |w|^(e-1) for s < |w| <= 1, identity outside. e = 1/K gives the
/// contraction, e = K its inverse with s the contracted radius.
struct PowerStretch {
    double s;
    double e;

    MapJet jet(Cplx w) const {
        const double aw = std::abs(w);
        if (aw <= s) {
            const double scale = std::pow(s, e - 1.0);
            return {scale * w, scale, 0.0};
        }
        if (aw <= 1.0) {
            const double alpha = e - 1.0;
            const double pw = std::pow(aw, alpha);
            return {w * pw, (1.0 + 0.5 * alpha) * pw, 0.5 * alpha * pw / (aw * aw) * (w * w)};
        }
        return {w, 1.0, 0.0};
    }
};

/// Scaled copy rho * f(z / rho); Wirtinger derivatives are those of f at z/rho.
struct ScaledPowerStretch {
    PowerStretch base;
    double rho;

    MapJet jet(Cplx z) const {
        MapJet inner = base.jet(z / rho);
        return {rho * inner.value, inner.d, inner.dbar};
    }
};

inline MapJet mobius_jet(const MobiusMap& m, Cplx z) {
    return {m(z), m.derivative(z), 0.0};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Extremal map constructors
// ---------------------------------------------------------------------------

/// The radial stretch: r^(1/K-1) z inside |z| < r, z |z|^(1/K-1) on the
/// annulus r <= |z| <= 1, identity outside the unit disk.
inline PiecewiseQCMap radial_stretch(double r, double big_k) {
    auto params = DistortionParams::from_K(big_k, 0.0, r);
    detail::PowerStretch ps{r, 1.0 / big_k};
    auto jet = [ps](Cplx z) { return ps.jet(z); };

    std::vector<MapBranch> branches;
    branches.push_back({[r](Cplx z) { return std::abs(z) <= r; }, jet, true, "core disk"});
    branches.push_back({[](Cplx z) { return std::abs(z) <= 1.0; }, jet, false, "stretch annulus"});
    branches.push_back({[](Cplx) { return true; }, jet, true, "identity exterior"});

    const double rk = std::pow(r, 2.0 / big_k);
    Disk core{0.0, r};
    Disk unit{0.0, 1.0};
    std::vector<ClosedFormImage> images;
    images.push_back({Region{core}, kPi * rk});
    images.push_back({Region{DiskDiff{unit, core}}, kPi * (1.0 - rk)});
    images.push_back({Region{unit}, kPi});
    return PiecewiseQCMap{std::move(branches), {core, unit}, params, std::nullopt, std::move(images)};
}

namespace detail {

/// Common frame for the pole-shifted extremals: z -> L(stretch(M(z))) with
/// M(z) = (z-p)/(1-pz) and L(w) = (w+p)/(1-p*p). The third branch collapses
/// to z/(1-pz) on the exterior of the unit disk.
inline PiecewiseQCMap pole_framed_stretch(const DistortionParams& params, double stretch_radius,
                                          double exponent, const Disk& core,
                                          std::vector<ClosedFormImage> images) {
    const double p = params.p();
    const MobiusMap m = MobiusMap::disk_automorphism(p);
    const double inv = 1.0 / (1.0 - p * p);
    PowerStretch ps{stretch_radius, exponent};

    auto jet = [m, ps, p, inv](Cplx z) {
        MapJet mj = mobius_jet(m, z);
        MapJet sj = compose_jet(ps.jet(mj.value), mj);
        return MapJet{inv * (sj.value + p), inv * sj.d, inv * sj.dbar};
    };

    std::vector<MapBranch> branches;
    branches.push_back({[core](Cplx z) { return core.contains_closed(z); }, jet, true, "core disk"});
    branches.push_back({[](Cplx z) { return std::abs(z) <= 1.0; }, jet, false, "stretch annulus"});
    branches.push_back({[](Cplx) { return true; }, jet, true, "conformal exterior"});

    std::optional<Cplx> pole;
    if (p > 0.0) pole = Cplx{1.0 / p, 0.0};
    return PiecewiseQCMap{std::move(branches),
                          {core, Disk{0.0, 1.0}},
                          params,
                          pole,
                          std::move(images)};
}

}  // namespace detail

/// Pole-shifted stretch: conformal on B(r), dilatation of modulus k on the
/// rest of the closed unit disk, z/(1-pz) outside. Maps B(r) onto the disk of
/// radius r^(1/K)/(1-p^2) about p/(1-p^2).
inline PiecewiseQCMap pole_stretch(const DistortionParams& params) {
    const double p = params.p(), r = params.r(), big_k = params.K();
    const double inv2 = 1.0 / ((1.0 - p * p) * (1.0 - p * p));
    const double rk = std::pow(r, 2.0 / big_k);
    Disk core = pseudo_disk(p, r);
    Disk unit{0.0, 1.0};

    std::vector<ClosedFormImage> images;
    images.push_back({Region{core}, kPi * rk * inv2});
    images.push_back({Region{DiskDiff{unit, core}}, kPi * (1.0 - rk) * inv2});
    images.push_back({Region{unit}, kPi * inv2});
    return detail::pole_framed_stretch(params, r, 1.0 / big_k, core, std::move(images));
}

/// Inverse-direction extremal: conformal on B0(r) = B(r^(1/K)), dilatation of
/// modulus k on the rest of the closed unit disk, z/(1-pz) outside. Maps
/// B0(r) onto the disk of radius r/(1-p^2) about p/(1-p^2).
inline PiecewiseQCMap inverse_stretch(const DistortionParams& params) {
    const double p = params.p(), r = params.r(), big_k = params.K();
    const double inv2 = 1.0 / ((1.0 - p * p) * (1.0 - p * p));
    const double s = std::pow(r, 1.0 / big_k);
    Disk core = pseudo_disk(p, s);
    Disk unit{0.0, 1.0};

    std::vector<ClosedFormImage> images;
    images.push_back({Region{core}, kPi * r * r * inv2});
    images.push_back({Region{DiskDiff{unit, core}}, kPi * (1.0 - r * r) * inv2});
    images.push_back({Region{unit}, kPi * inv2});
    return detail::pole_framed_stretch(params, s, big_k, core, std::move(images));
}

// ---------------------------------------------------------------------------
// Stacked construction for the weighted equality family
// ---------------------------------------------------------------------------

struct StackedFamily {
    PiecewiseQCMap map;
    std::vector<double> weights;   // w_j, strictly increasing, w_1 >= 1
    std::vector<Region> annuli;    // conformal regions carrying weight w_j
    std::vector<double> rho;       // scale chain, rho_1 = 1
    std::vector<double> pweights;  // the validated p_j
};

/// A feasible weight vector for a given radius chain: split each stage's
/// budget in half, closing the chain exactly at the last stage.
inline std::vector<double> feasible_pweights(const std::vector<double>& radii) {
    if (radii.empty()) throw std::invalid_argument("feasible_pweights: empty radius chain");
    std::vector<double> pw(radii.size());
    double rho_sq = 1.0;
    for (std::size_t j = 0; j + 1 < radii.size(); ++j) {
        pw[j] = 0.5 * radii[j] * radii[j] * rho_sq;
        rho_sq = radii[j] * radii[j] * rho_sq - pw[j];
    }
    pw.back() = radii.back() * radii.back() * rho_sq;
    return pw;
}

/// Stack of scaled radial stretches conjugated into the pole frame:
///   G(z) = (1-p^2)^(-1) g((z-p)/(1-pz)) + p/(1-p^2),
///   g = f_{r_1}^{rho_1} o ... o f_{r_n}^{rho_n},  f_r^rho(z) = rho f_r(z/rho).
/// The inputs must satisfy the weight normalization sum_j p_j w_j^K = 1 with
/// w_j = (prod_{l<=j} r_l)^(-2/K) and admit the scale chain rho_1 = 1,
/// rho_{j+1}^2 = r_j^2 rho_j^2 - p_j > 0, r_n^2 rho_n^2 = p_n.
inline StackedFamily stacked_map(double p, double big_k, const std::vector<double>& radii,
                                 const std::vector<double>& pweights) {
    const std::size_t n = radii.size();
    if (n == 0) throw std::invalid_argument("stacked_map: empty radius chain");
    if (pweights.size() != n) throw std::invalid_argument("stacked_map: radius/weight size mismatch");
    for (double r : radii)
        if (!(r > 0.0 && r < 1.0)) throw std::invalid_argument("stacked_map: radii must be in (0, 1)");
    for (double w : pweights)
        if (!(w > 0.0)) throw std::invalid_argument("stacked_map: weights must be positive");

    // Weight chain w_j and its normalization.
    std::vector<double> weights(n);
    double prod = 1.0;
    for (std::size_t j = 0; j < n; ++j) {
        prod *= radii[j];
        weights[j] = std::pow(prod, -2.0 / big_k);
    }
    double norm = 0.0;
    for (std::size_t j = 0; j < n; ++j) norm += pweights[j] * std::pow(weights[j], big_k);
    if (std::abs(norm - 1.0) > 1e-12)
        throw std::invalid_argument("stacked_map: weight normalization failed, sum p_j w_j^K = " +
                                    std::to_string(norm));

    // Scale chain.
    std::vector<double> rho(n + 1, 0.0);
    rho[0] = 1.0;
    for (std::size_t j = 0; j + 1 < n; ++j) {
        const double next_sq = radii[j] * radii[j] * rho[j] * rho[j] - pweights[j];
        if (!(next_sq > 0.0)) throw std::invalid_argument("stacked_map: infeasible scale chain");
        rho[j + 1] = std::sqrt(next_sq);
    }
    const double closure = radii[n - 1] * radii[n - 1] * rho[n - 1] * rho[n - 1];
    if (std::abs(closure - pweights[n - 1]) > 1e-12)
        throw std::invalid_argument("stacked_map: chain does not close, r_n^2 rho_n^2 != p_n");

    // Composition jet; stage n acts first.
    const MobiusMap m = MobiusMap::disk_automorphism(p);
    const double inv = 1.0 / (1.0 - p * p);
    std::vector<detail::ScaledPowerStretch> stages(n);
    for (std::size_t j = 0; j < n; ++j)
        stages[j] = {detail::PowerStretch{radii[j], 1.0 / big_k}, rho[j]};

    auto jet = [m, stages, p, inv](Cplx z) {
        MapJet acc = detail::mobius_jet(m, z);
        for (std::size_t idx = stages.size(); idx-- > 0;)
            acc = compose_jet(stages[idx].jet(acc.value), acc);
        return MapJet{inv * (acc.value + p), inv * acc.d, inv * acc.dbar};
    };

    // Conformal annuli E~_j and the seam circles, pulled back through M.
    const MobiusMap m_inv = m.inverse();
    auto pullback_disk = [&](double radius) {
        return std::get<Disk>(mobius_image_disk(m_inv, Disk{0.0, radius}));
    };

    std::vector<Region> annuli;
    std::vector<Disk> seams;
    std::vector<MapBranch> branches;
    seams.push_back(Disk{0.0, 1.0});

    Disk core = pullback_disk(rho[n - 1] * radii[n - 1]);
    for (std::size_t j = 0; j < n; ++j) {
        Disk outer = pullback_disk(rho[j] * radii[j]);
        seams.push_back(outer);
        if (j + 1 < n) {
            Disk inner = pullback_disk(rho[j + 1]);
            seams.push_back(inner);
            annuli.push_back(Region{DiskDiff{outer, inner}});
        } else {
            annuli.push_back(Region{core});
        }
    }

    // Branch list: innermost conformal disk, then alternating stretch/conformal
    // rings outward, then the conformal exterior. One shared jet everywhere.
    branches.push_back({[core](Cplx z) { return core.contains_closed(z); }, jet, true, "core disk"});
    for (std::size_t j = n - 1; j-- > 0;) {
        Disk top = pullback_disk(rho[j + 1]);
        Disk ann_outer = pullback_disk(rho[j] * radii[j]);
        branches.push_back(
            {[top](Cplx z) { return top.contains_closed(z); }, jet, false, "stretch ring"});
        branches.push_back(
            {[ann_outer](Cplx z) { return ann_outer.contains_closed(z); }, jet, true, "conformal ring"});
    }
    branches.push_back({[](Cplx z) { return std::abs(z) <= 1.0; }, jet, false, "outer stretch ring"});
    branches.push_back({[](Cplx) { return true; }, jet, true, "conformal exterior"});

    auto params = DistortionParams::from_K(big_k, p, radii.front());
    std::optional<Cplx> pole;
    if (p > 0.0) pole = Cplx{1.0 / p, 0.0};
    PiecewiseQCMap map{std::move(branches), std::move(seams), params, pole, {}};
    return StackedFamily{std::move(map), std::move(weights), std::move(annuli), std::move(rho),
                         pweights};
}

// ---------------------------------------------------------------------------
// Sharpness witness for the Hilbert-transform bound
// ---------------------------------------------------------------------------

struct Th3Witness {
    PiecewiseQCMap map;
    Disk domain;                         // E = B(r)
    std::function<Cplx(Cplx)> dbar_rule;  // chi_E (1 - p conj(z))^(-2)
    std::function<Cplx(Cplx)> d_rule;     // -r^2 (z - p)^(-2) off E
};

/// Continuous test map whose Wirtinger derivatives are supported on E and on
/// its complement respectively; their exact expressions pin the transform
/// conventions.
inline Th3Witness th3_witness(double p, double r) {
    Disk domain = pseudo_disk(p, r);
    const double inv = 1.0 / (1.0 - p * p);
    const double r2 = r * r;

    auto inner_jet = [p, inv](Cplx z) {
        Cplx zb = std::conj(z);
        Cplx den = 1.0 - p * zb;
        return MapJet{inv * (zb - p) / den, 0.0, 1.0 / (den * den)};
    };
    auto outer_jet = [p, inv, r2](Cplx z) {
        Cplx zp = z - p;
        return MapJet{r2 * inv * (1.0 - p * z) / zp, -r2 / (zp * zp), 0.0};
    };

    std::vector<MapBranch> branches;
    branches.push_back({[domain](Cplx z) { return domain.contains_closed(z); }, inner_jet, false,
                        "folded core"});
    branches.push_back({[](Cplx) { return true; }, outer_jet, true, "conformal exterior"});

    auto params = DistortionParams::from_k(0.0, p, r);
    PiecewiseQCMap map{std::move(branches), {domain}, params, Cplx{p, 0.0}, {}};

    auto dbar_rule = [domain, p](Cplx z) -> Cplx {
        if (!domain.contains_closed(z)) return 0.0;
        Cplx den = 1.0 - p * std::conj(z);
        return 1.0 / (den * den);
    };
    auto d_rule = [domain, p, r2](Cplx z) -> Cplx {
        if (domain.contains_closed(z)) return 0.0;
        Cplx zp = z - p;
        return -r2 / (zp * zp);
    };
    return Th3Witness{std::move(map), domain, std::move(dbar_rule), std::move(d_rule)};
}

// ---------------------------------------------------------------------------
// Finite-difference probes
// ---------------------------------------------------------------------------

namespace detail {

inline void check_fd_point(const PiecewiseQCMap& f, Cplx z, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("finite-difference step must be positive");
    if (f.seam_distance(z) < 2.0 * h)
        throw std::domain_error("finite differences: point within 2h of a branch seam");
    if (f.pole() && std::abs(z - *f.pole()) < 2.0 * h)
        throw std::domain_error("finite differences: point within 2h of the pole");
}

inline MapJet fd_jet(const PiecewiseQCMap& f, Cplx z, double h) {
    check_fd_point(f, z, h);
    const Cplx fx = (f(z + h) - f(z - h)) / (2.0 * h);
    const Cplx fy = (f(z + Cplx{0.0, h}) - f(z - Cplx{0.0, h})) / (2.0 * h);
    return {f(z), 0.5 * (fx - Cplx{0.0, 1.0} * fy), 0.5 * (fx + Cplx{0.0, 1.0} * fy)};
}

}  // namespace detail

/// Complex dilatation mu = dbar f / d f from centered Wirtinger differences.
inline Cplx dilatation_at(const PiecewiseQCMap& f, Cplx z, double h) {
    return detail::fd_jet(f, z, h).dilatation();
}

/// Jacobian |d f|^2 - |dbar f|^2 from centered Wirtinger differences.
inline double jacobian_at(const PiecewiseQCMap& f, Cplx z, double h) {
    return detail::fd_jet(f, z, h).jacobian();
}

}  // namespace qcarea
