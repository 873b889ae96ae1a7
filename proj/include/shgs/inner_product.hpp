#pragma once

// Exact L2 inner products between shearlet atoms.
//
// Every atom is a tensor spline pulled back through an affine map, so it is a
// polynomial on each parallelogram cell. Overlaps of cells are clipped and the
// product is integrated with a triangle rule that is exact for its degree.

#include "shgs/shearlet_system.hpp"

#include <array>
#include <vector>

namespace shgs {

class AtomInnerProduct {
public:
    explicit AtomInnerProduct(GeneratorSpec spec);

    /// <r_p, r_q> for any two atoms, in or out of a layout.
    double operator()(const ShearletIndex& p, const ShearletIndex& q) const;

    /// ||psi||^2 or ||phi||^2, the squared norm shared by every atom of a cone.
    double norm2(Cone cone) const;

    const GeneratorSpec& spec() const { return spec_; }

private:
    struct Atom {
        Eigen::Matrix2d B;
        Eigen::Vector2d m;
        double norm;
        const SeparableGenerator* gen;
    };
    Atom atom(const ShearletIndex& idx) const;
    double integrate(const Atom& fine, const Atom& coarse) const;

    GeneratorSpec spec_;
    std::array<SeparableGenerator, 3> generators_;
    std::vector<std::array<double, 3>> rule_; // (x, y, weight) on the unit triangle
};

} // namespace shgs
