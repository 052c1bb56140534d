#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "qcarea/geometry.hpp"
#include "qcarea/rng.hpp"

namespace qcarea {

struct BBox {
    double x0, y0, x1, y1;
    double area() const { return (x1 - x0) * (y1 - y0); }
    bool contains(Cplx z) const {
        return z.real() >= x0 && z.real() <= x1 && z.imag() >= y0 && z.imag() <= y1;
    }
};

inline BBox disk_bbox(const Disk& d) {
    return {d.center.real() - d.radius, d.center.imag() - d.radius,
            d.center.real() + d.radius, d.center.imag() + d.radius};
}

/// Area of the intersection of two disks (circular lens), closed form.
inline double lens_area(const Disk& a, const Disk& b) {
    const double d = std::abs(a.center - b.center);
    const double r1 = a.radius, r2 = b.radius;
    if (d >= r1 + r2) return 0.0;
    if (d <= std::abs(r1 - r2)) {
        const double r = std::min(r1, r2);
        return kPi * r * r;
    }
    const double alpha = std::acos(std::clamp((d * d + r1 * r1 - r2 * r2) / (2 * d * r1), -1.0, 1.0));
    const double beta = std::acos(std::clamp((d * d + r2 * r2 - r1 * r1) / (2 * d * r2), -1.0, 1.0));
    const double tri = 0.5 * std::sqrt(std::max(0.0, (-d + r1 + r2) * (d + r1 - r2) *
                                                     (d - r1 + r2) * (d + r1 + r2)));
    return r1 * r1 * alpha + r2 * r2 * beta - tri;
}

/// Boolean raster over a uniform grid; cell (i, j) covers
/// [x0 + j h, x0 + (j+1) h] x [y0 + i h, y0 + (i+1) h].
struct GridMask {
    std::size_t rows = 0, cols = 0;
    double x0 = 0, y0 = 0, h = 0;
    std::vector<std::uint8_t> bits;  // row-major, rows*cols entries

    bool at(std::size_t i, std::size_t j) const { return bits[i * cols + j] != 0; }
    std::size_t count() const {
        std::size_t n = 0;
        for (auto b : bits) n += (b != 0);
        return n;
    }
    bool contains(Cplx z) const {
        const double fx = (z.real() - x0) / h, fy = (z.imag() - y0) / h;
        if (fx < 0 || fy < 0) return false;
        const auto j = static_cast<std::size_t>(fx), i = static_cast<std::size_t>(fy);
        if (i >= rows || j >= cols) return false;
        return at(i, j);
    }
};

/// Text format: header "rows cols x0 y0 h", then `rows` lines of 0/1 digits.
inline GridMask read_grid_mask(std::istream& in) {
    GridMask m;
    if (!(in >> m.rows >> m.cols >> m.x0 >> m.y0 >> m.h))
        throw std::runtime_error("grid mask: malformed header, expected 'rows cols x0 y0 h'");
    if (m.rows == 0 || m.cols == 0 || !(m.h > 0))
        throw std::runtime_error("grid mask: empty grid or nonpositive spacing");
    m.bits.assign(m.rows * m.cols, 0);
    std::size_t seen = 0;
    char ch;
    while (seen < m.rows * m.cols && in.get(ch)) {
        if (ch == '0' || ch == '1') m.bits[seen++] = static_cast<std::uint8_t>(ch - '0');
    }
    if (seen != m.rows * m.cols)
        throw std::runtime_error("grid mask: truncated raster data");
    return m;
}

inline void write_grid_mask(std::ostream& out, const GridMask& m) {
    out << m.rows << ' ' << m.cols << ' ' << m.x0 << ' ' << m.y0 << ' ' << m.h << '\n';
    for (std::size_t i = 0; i < m.rows; ++i) {
        for (std::size_t j = 0; j < m.cols; ++j) out << (m.at(i, j) ? '1' : '0');
        out << '\n';
    }
}

// ---------------------------------------------------------------------------
// Region: a bounded measurable planar set with exact area where closed forms
// exist and efficient uniform proposal sampling everywhere.
// ---------------------------------------------------------------------------

struct DiskDiff {
    Disk outer;
    Disk inner;
};

struct ClippedExterior {
    Disk excluded;
    Disk clip;
};

struct DiskUnion {
    std::vector<Disk> disks;
};

class Region {
public:
    using Variant = std::variant<Disk, DiskDiff, ClippedExterior, DiskUnion, GridMask>;

    Region(Disk d) : v_(std::move(d)) {}
    Region(DiskDiff d) : v_(std::move(d)) {}
    Region(ClippedExterior c) : v_(std::move(c)) {}
    Region(DiskUnion u) : v_(std::move(u)) {
        if (std::get<DiskUnion>(v_).disks.empty())
            throw std::invalid_argument("Region: empty disk union");
    }
    Region(GridMask m) : v_(std::move(m)) {}

    /// An exterior region is representable only with its quadrature clip.
    Region(const ExteriorRegion& e) : v_(Disk{0.0, 1.0}) {
        if (!e.clip) throw std::invalid_argument("Region: unbounded exterior region without clip");
        v_ = ClippedExterior{e.excluded, *e.clip};
    }

    const Variant& variant() const { return v_; }

    bool contains(Cplx z) const {
        return std::visit(
            [&](const auto& r) -> bool {
                using T = std::decay_t<decltype(r)>;
                if constexpr (std::is_same_v<T, Disk>) {
                    return r.contains(z);
                } else if constexpr (std::is_same_v<T, DiskDiff>) {
                    return r.outer.contains(z) && !r.inner.contains_closed(z);
                } else if constexpr (std::is_same_v<T, ClippedExterior>) {
                    return r.clip.contains(z) && !r.excluded.contains_closed(z);
                } else if constexpr (std::is_same_v<T, DiskUnion>) {
                    for (const auto& d : r.disks)
                        if (d.contains(z)) return true;
                    return false;
                } else {
                    return r.contains(z);
                }
            },
            v_);
    }

    BBox bounding_box() const {
        return std::visit(
            [&](const auto& r) -> BBox {
                using T = std::decay_t<decltype(r)>;
                if constexpr (std::is_same_v<T, Disk>) {
                    return disk_bbox(r);
                } else if constexpr (std::is_same_v<T, DiskDiff>) {
                    return disk_bbox(r.outer);
                } else if constexpr (std::is_same_v<T, ClippedExterior>) {
                    return disk_bbox(r.clip);
                } else if constexpr (std::is_same_v<T, DiskUnion>) {
                    BBox box = disk_bbox(r.disks.front());
                    for (const auto& d : r.disks) {
                        BBox b = disk_bbox(d);
                        box.x0 = std::min(box.x0, b.x0);
                        box.y0 = std::min(box.y0, b.y0);
                        box.x1 = std::max(box.x1, b.x1);
                        box.y1 = std::max(box.y1, b.y1);
                    }
                    return box;
                } else {
                    return BBox{r.x0, r.y0, r.x0 + r.cols * r.h, r.y0 + r.rows * r.h};
                }
            },
            v_);
    }

    /// Closed-form area when one exists. Disk, disk difference, clipped
    /// exterior and grid masks always have one; a union of <= 3 disks does
    /// unless all three overlap in a common region.
    std::optional<double> exact_area() const {
        return std::visit(
            [&](const auto& r) -> std::optional<double> {
                using T = std::decay_t<decltype(r)>;
                if constexpr (std::is_same_v<T, Disk>) {
                    return r.area();
                } else if constexpr (std::is_same_v<T, DiskDiff>) {
                    return r.outer.area() - lens_area(r.outer, r.inner);
                } else if constexpr (std::is_same_v<T, ClippedExterior>) {
                    return r.clip.area() - lens_area(r.clip, r.excluded);
                } else if constexpr (std::is_same_v<T, DiskUnion>) {
                    return union_exact_area(r);
                } else {
                    return static_cast<double>(r.count()) * r.h * r.h;
                }
            },
            v_);
    }

    /// Uniform proposal sampler covering the region. Draws land in a superset
    /// of the region whose area is proposal_area(); a draw carries weight
    /// `multiplicity_weight` so that
    ///   integral_E F dm = proposal_area * E[ F(z) * weight(z) ]
    /// with weight zero off the region.
    double proposal_area() const {
        return std::visit(
            [&](const auto& r) -> double {
                using T = std::decay_t<decltype(r)>;
                if constexpr (std::is_same_v<T, Disk>) {
                    return r.area();
                } else if constexpr (std::is_same_v<T, DiskDiff>) {
                    const double a = annulus_inner_radius(r.outer, r.inner);
                    return kPi * (r.outer.radius * r.outer.radius - a * a);
                } else if constexpr (std::is_same_v<T, ClippedExterior>) {
                    const double a = annulus_inner_radius(r.clip, r.excluded);
                    return kPi * (r.clip.radius * r.clip.radius - a * a);
                } else if constexpr (std::is_same_v<T, DiskUnion>) {
                    double total = 0;
                    for (const auto& d : r.disks) total += d.area();
                    return total;
                } else {
                    return static_cast<double>(r.count()) * r.h * r.h;
                }
            },
            v_);
    }

    /// One proposal draw; returns the point and its multiplicity weight
    /// (0 when the draw fell outside the region).
    Cplx sample(Rng& rng, double& weight) const {
        return std::visit(
            [&](const auto& r) -> Cplx {
                using T = std::decay_t<decltype(r)>;
                if constexpr (std::is_same_v<T, Disk>) {
                    weight = 1.0;
                    return sample_disk(r, rng);
                } else if constexpr (std::is_same_v<T, DiskDiff>) {
                    const double a = annulus_inner_radius(r.outer, r.inner);
                    Cplx z = sample_annulus(r.outer.center, a, r.outer.radius, rng);
                    weight = r.inner.contains_closed(z) ? 0.0 : 1.0;
                    return z;
                } else if constexpr (std::is_same_v<T, ClippedExterior>) {
                    const double a = annulus_inner_radius(r.clip, r.excluded);
                    Cplx z = sample_annulus(r.clip.center, a, r.clip.radius, rng);
                    weight = r.excluded.contains_closed(z) ? 0.0 : 1.0;
                    return z;
                } else if constexpr (std::is_same_v<T, DiskUnion>) {
                    double total = 0;
                    for (const auto& d : r.disks) total += d.area();
                    double pick = rng.uniform() * total, acc = 0;
                    const Disk* chosen = &r.disks.back();
                    for (const auto& d : r.disks) {
                        acc += d.area();
                        if (pick < acc) { chosen = &d; break; }
                    }
                    Cplx z = sample_disk(*chosen, rng);
                    int mult = 0;
                    for (const auto& d : r.disks) mult += d.contains(z) ? 1 : 0;
                    weight = mult > 0 ? 1.0 / mult : 1.0;  // boundary draws count once
                    return z;
                } else {
                    // Uniform over set cells; requires at least one set bit.
                    const std::size_t target = static_cast<std::size_t>(
                        rng.uniform() * static_cast<double>(r.count()));
                    std::size_t seen = 0;
                    for (std::size_t idx = 0; idx < r.bits.size(); ++idx) {
                        if (!r.bits[idx]) continue;
                        if (seen++ == target) {
                            const std::size_t i = idx / r.cols, j = idx % r.cols;
                            weight = 1.0;
                            return {r.x0 + (j + rng.uniform()) * r.h,
                                    r.y0 + (i + rng.uniform()) * r.h};
                        }
                    }
                    weight = 1.0;
                    return {r.x0, r.y0};
                }
            },
            v_);
    }

    /// Minimum distance from the region to a point (0 if the point is inside
    /// or within resolution of the boundary). Used for pole-margin guards.
    double distance_to(Cplx z) const {
        if (contains(z)) return 0.0;
        return std::visit(
            [&](const auto& r) -> double {
                using T = std::decay_t<decltype(r)>;
                if constexpr (std::is_same_v<T, Disk>) {
                    return std::max(0.0, r.boundary_distance(z));
                } else if constexpr (std::is_same_v<T, DiskDiff>) {
                    return std::max({0.0, r.outer.boundary_distance(z),
                                     -r.inner.boundary_distance(z)});
                } else if constexpr (std::is_same_v<T, ClippedExterior>) {
                    return std::max({0.0, r.clip.boundary_distance(z),
                                     -r.excluded.boundary_distance(z)});
                } else if constexpr (std::is_same_v<T, DiskUnion>) {
                    double dmin = std::numeric_limits<double>::infinity();
                    for (const auto& d : r.disks)
                        dmin = std::min(dmin, std::max(0.0, d.boundary_distance(z)));
                    return dmin;
                } else {
                    // Coarse but safe: distance to the raster bounding box,
                    // refined by a scan over set cells.
                    double dmin = std::numeric_limits<double>::infinity();
                    for (std::size_t i = 0; i < r.rows; ++i)
                        for (std::size_t j = 0; j < r.cols; ++j) {
                            if (!r.at(i, j)) continue;
                            Cplx c{r.x0 + (j + 0.5) * r.h, r.y0 + (i + 0.5) * r.h};
                            dmin = std::min(dmin, std::abs(z - c) - 0.7072 * r.h);
                        }
                    return std::max(0.0, dmin);
                }
            },
            v_);
    }

    std::string describe() const {
        std::ostringstream os;
        std::visit(
            [&](const auto& r) {
                using T = std::decay_t<decltype(r)>;
                if constexpr (std::is_same_v<T, Disk>) {
                    os << "disk(center=" << r.center << ", radius=" << r.radius << ")";
                } else if constexpr (std::is_same_v<T, DiskDiff>) {
                    os << "disk(center=" << r.outer.center << ", radius=" << r.outer.radius
                       << ") minus disk(center=" << r.inner.center << ", radius=" << r.inner.radius
                       << ")";
                } else if constexpr (std::is_same_v<T, ClippedExterior>) {
                    os << "exterior of disk(center=" << r.excluded.center
                       << ", radius=" << r.excluded.radius << ") clipped to disk(center="
                       << r.clip.center << ", radius=" << r.clip.radius << ")";
                } else if constexpr (std::is_same_v<T, DiskUnion>) {
                    os << "union of " << r.disks.size() << " disks";
                } else {
                    os << "grid mask " << r.rows << "x" << r.cols << " (h=" << r.h << ")";
                }
            },
            v_);
        return os.str();
    }

private:
    static Cplx sample_disk(const Disk& d, Rng& rng) {
        const double rho = d.radius * std::sqrt(rng.uniform());
        const double th = 2.0 * kPi * rng.uniform();
        return d.center + rho * Cplx{std::cos(th), std::sin(th)};
    }

    static Cplx sample_annulus(Cplx center, double r_in, double r_out, Rng& rng) {
        const double u = rng.uniform(r_in * r_in, r_out * r_out);
        const double rho = std::sqrt(u);
        const double th = 2.0 * kPi * rng.uniform();
        return center + rho * Cplx{std::cos(th), std::sin(th)};
    }

    /// Largest centered radius inside `outer` fully covered by `inner`;
    /// proposals skip that core when sampling outer-minus-inner.
    static double annulus_inner_radius(const Disk& outer, const Disk& inner) {
        const double covered = inner.radius - std::abs(inner.center - outer.center);
        return std::clamp(covered, 0.0, outer.radius);
    }

    static std::optional<double> union_exact_area(const DiskUnion& u) {
        const auto& ds = u.disks;
        if (ds.size() == 1) return ds[0].area();
        if (ds.size() == 2) return ds[0].area() + ds[1].area() - lens_area(ds[0], ds[1]);
        if (ds.size() > 3) return std::nullopt;
        if (triple_intersection_nonempty(ds[0], ds[1], ds[2])) return std::nullopt;
        double total = 0;
        for (const auto& d : ds) total += d.area();
        total -= lens_area(ds[0], ds[1]) + lens_area(ds[0], ds[2]) + lens_area(ds[1], ds[2]);
        return total;
    }

    static bool triple_intersection_nonempty(const Disk& a, const Disk& b, const Disk& c) {
        const Disk* ds[3] = {&a, &b, &c};
        // A common point exists iff some center lies in all three, or a
        // pairwise circle intersection point lies in the third disk.
        for (int i = 0; i < 3; ++i) {
            bool in_all = true;
            for (int j = 0; j < 3; ++j)
                if (!ds[j]->contains_closed(ds[i]->center)) in_all = false;
            if (in_all) return true;
        }
        const int pairs[3][3] = {{0, 1, 2}, {0, 2, 1}, {1, 2, 0}};
        for (const auto& pr : pairs) {
            const Disk &d1 = *ds[pr[0]], &d2 = *ds[pr[1]], &d3 = *ds[pr[2]];
            const double d = std::abs(d1.center - d2.center);
            if (d >= d1.radius + d2.radius || d <= std::abs(d1.radius - d2.radius) || d == 0)
                continue;
            const double t = (d * d + d1.radius * d1.radius - d2.radius * d2.radius) / (2 * d);
            const double hh = d1.radius * d1.radius - t * t;
            if (hh < 0) continue;
            const Cplx dir = (d2.center - d1.center) / d;
            const Cplx base = d1.center + t * dir;
            const Cplx perp = Cplx{-dir.imag(), dir.real()} * std::sqrt(hh);
            if (d3.contains_closed(base + perp) || d3.contains_closed(base - perp)) return true;
        }
        return false;
    }

    Variant v_;
};

}  // namespace qcarea
