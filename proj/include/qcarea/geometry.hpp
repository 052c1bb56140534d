#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <stdexcept>
#include <variant>

namespace qcarea {

using Cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

/// Distinguished point-at-infinity marker on the extended plane.
inline Cplx inf_point() {
    return {std::numeric_limits<double>::infinity(), 0.0};
}

inline bool is_inf_point(Cplx z) {
    return std::isinf(z.real()) || std::isinf(z.imag());
}

inline bool is_finite_point(Cplx z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
}

// ---------------------------------------------------------------------------
// Disks and generalized circles
// ---------------------------------------------------------------------------

struct Disk {
    Cplx center;
    double radius;

    Disk(Cplx c, double r) : center(c), radius(r) {
        if (!(r > 0.0) || !is_finite_point(c))
            throw std::invalid_argument("Disk: radius must be positive and center finite");
    }

    bool contains(Cplx z) const { return std::abs(z - center) < radius; }
    bool contains_closed(Cplx z) const { return std::abs(z - center) <= radius; }
    double area() const { return kPi * radius * radius; }
    Cplx boundary_point(double theta) const {
        return center + radius * Cplx{std::cos(theta), std::sin(theta)};
    }
    /// Signed distance of z to the boundary circle (negative inside).
    double boundary_distance(Cplx z) const { return std::abs(z - center) - radius; }
};

/// The set {z : |z - excluded.center| > excluded.radius}, optionally clipped
/// to a bounding disk for quadrature.
struct ExteriorRegion {
    Disk excluded;
    std::optional<Disk> clip;

    bool contains(Cplx z) const {
        if (!(std::abs(z - excluded.center) > excluded.radius)) return false;
        return !clip || clip->contains(z);
    }
};

/// Diagnostic result for a circle through the pole of a Mobius map.
struct HalfPlane {
    Cplx boundary_point;
    Cplx inward_normal;  // unit vector pointing into the image region

    bool contains(Cplx z) const {
        Cplx d = z - boundary_point;
        return d.real() * inward_normal.real() + d.imag() * inward_normal.imag() > 0.0;
    }
};

// ---------------------------------------------------------------------------
// Mobius transformations
// ---------------------------------------------------------------------------

/// Fractional linear transformation z -> (az + b)/(cz + d) on the extended
/// plane. Non-degeneracy |ad - bc| > 1e-14 is enforced at construction.
class MobiusMap {
public:
    MobiusMap(Cplx a, Cplx b, Cplx c, Cplx d) : a_(a), b_(b), c_(c), d_(d) {
        if (std::abs(det()) <= 1e-14)
            throw std::invalid_argument("MobiusMap: degenerate coefficients, |ad-bc| <= 1e-14");
    }

    static MobiusMap identity() { return {1.0, 0.0, 0.0, 1.0}; }

    /// z -> 1/z.
    static MobiusMap inversion() { return {0.0, 1.0, 1.0, 0.0}; }

    /// z -> (z - p)/(1 - pz), the unit-disk automorphism moving p to 0.
    /// p is restricted to real values in [0, 1).
    static MobiusMap disk_automorphism(double p) {
        check_p(p);
        return {1.0, -p, -p, 1.0};
    }

    /// z -> z/(1 - pz), the conformal reference frame with pole at 1/p.
    static MobiusMap pole_frame(double p) {
        check_p(p);
        return {1.0, 0.0, -p, 1.0};
    }

    /// z -> 1/(z - p), the mirrored reference frame with pole at p.
    static MobiusMap reciprocal_frame(double p) {
        check_p(p);
        return {0.0, 1.0, 1.0, -p};
    }

    Cplx a() const { return a_; }
    Cplx b() const { return b_; }
    Cplx c() const { return c_; }
    Cplx d() const { return d_; }
    Cplx det() const { return a_ * d_ - b_ * c_; }

    /// Evaluate on the extended plane; the pole maps to the infinity marker.
    Cplx operator()(Cplx z) const {
        if (is_inf_point(z)) {
            if (std::abs(c_) == 0.0) return inf_point();
            return a_ / c_;
        }
        Cplx den = c_ * z + d_;
        if (std::abs(den) == 0.0) return inf_point();
        return (a_ * z + b_) / den;
    }

    /// Preimage of infinity; the infinity marker itself when c == 0.
    Cplx pole() const {
        if (std::abs(c_) == 0.0) return inf_point();
        return -d_ / c_;
    }

    /// Complex derivative (ad - bc)/(cz + d)^2 at a finite non-pole point.
    Cplx derivative(Cplx z) const {
        Cplx den = c_ * z + d_;
        return det() / (den * den);
    }

    MobiusMap inverse() const { return {d_, -b_, -c_, a_}; }

    friend MobiusMap compose(const MobiusMap& m1, const MobiusMap& m2) {
        return {m1.a_ * m2.a_ + m1.b_ * m2.c_, m1.a_ * m2.b_ + m1.b_ * m2.d_,
                m1.c_ * m2.a_ + m1.d_ * m2.c_, m1.c_ * m2.b_ + m1.d_ * m2.d_};
    }

private:
    static void check_p(double p) {
        if (!(p >= 0.0 && p < 1.0))
            throw std::invalid_argument("pole parameter p must lie in [0, 1)");
    }

    Cplx a_, b_, c_, d_;
};

using GeneralizedDisk = std::variant<Disk, ExteriorRegion, HalfPlane>;

/// Exact image of a disk under a Mobius map. Returns a Disk when the pole
/// lies outside the closed disk, the exterior of a disk when the pole lies
/// inside, and a HalfPlane when the pole sits on the boundary (within 1e-12).
inline GeneralizedDisk mobius_image_disk(const MobiusMap& m, const Disk& disk) {
    const Cplx pole = m.pole();

    if (is_inf_point(pole)) {
        // Affine map: circles go to circles with |a/d| scaling.
        Cplx scale = m.a() / m.d();
        return Disk{m(disk.center), std::abs(scale) * disk.radius};
    }

    const double pole_gap = std::abs(pole - disk.center) - disk.radius;
    if (std::abs(pole_gap) <= 1e-12) {
        // Pole on the boundary: the image is a half plane. Build the line from
        // two boundary images away from the pole and orient by the center image.
        double theta0 = std::arg(pole - disk.center);
        Cplx w1 = m(disk.boundary_point(theta0 + kPi * 0.5));
        Cplx w2 = m(disk.boundary_point(theta0 + kPi));
        Cplx wc = m(disk.center);
        Cplx tangent = (w2 - w1) / std::abs(w2 - w1);
        Cplx normal{-tangent.imag(), tangent.real()};
        Cplx d = wc - w1;
        if (d.real() * normal.real() + d.imag() * normal.imag() < 0.0) normal = -normal;
        return HalfPlane{w1, normal};
    }

    // Image circle via the symmetric point of the pole: the reflection of the
    // pole across the input circle maps to the image circle's center.
    Cplx reflected = disk.center +
                     (disk.radius * disk.radius) / std::conj(pole - disk.center);
    Cplx image_center = m(reflected);
    double image_radius = std::abs(m(disk.boundary_point(0.0)) - image_center);
    Disk image{image_center, image_radius};

    if (pole_gap < 0.0) return ExteriorRegion{image, std::nullopt};
    return Disk{image};
}

/// The disk {z : |z - p(1-r^2)/(1-p^2 r^2)| < r(1-p^2)/(1-p^2 r^2)}, i.e. the
/// preimage of the centered disk of radius r under z -> (z - p)/(1 - pz).
/// Always a compact subset of the open unit disk.
inline Disk pseudo_disk(double p, double r) {
    if (!(p >= 0.0 && p < 1.0)) throw std::invalid_argument("pseudo_disk: p must be in [0, 1)");
    if (!(r > 0.0 && r < 1.0)) throw std::invalid_argument("pseudo_disk: r must be in (0, 1)");
    const double den = 1.0 - p * p * r * r;
    return Disk{Cplx{p * (1.0 - r * r) / den, 0.0}, r * (1.0 - p * p) / den};
}

/// Exact image of a disk under z -> 1/z: the exterior of a disk when 0 lies
/// inside, a disk when 0 lies outside the closure. A boundary pole (within
/// 1e-12) is rejected.
inline std::variant<Disk, ExteriorRegion> invert_region(const Disk& disk) {
    const double gap = std::abs(disk.center) - disk.radius;
    if (std::abs(gap) <= 1e-12)
        throw std::domain_error("invert_region: origin on the boundary circle");

    GeneralizedDisk image = mobius_image_disk(MobiusMap::inversion(), disk);
    if (gap < 0.0) return std::get<ExteriorRegion>(image);
    return std::get<Disk>(image);
}

/// Inversion of an exterior region; defined when 0 lies in the excluded disk,
/// in which case the image is the bounded disk mirror.
inline Disk invert_region(const ExteriorRegion& region) {
    if (!region.excluded.contains(0.0))
        throw std::domain_error("invert_region: exterior region must exclude a disk around 0");
    GeneralizedDisk image = mobius_image_disk(MobiusMap::inversion(), region.excluded);
    return std::get<ExteriorRegion>(image).excluded;
}

}  // namespace qcarea
