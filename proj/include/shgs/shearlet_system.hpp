#pragma once

// Finite cone-adapted shearlet system spanning the reconstruction space at a
// given scale cap, with its canonical ordering.

#include "shgs/generators.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <unordered_map>
#include <vector>

namespace shgs {

enum class Cone { Scaling, Horizontal, Vertical };

const char* to_string(Cone cone);

struct ShearletIndex {
    Cone cone = Cone::Scaling;
    int j = 0; // unused for the scaling cone
    int k = 0; // unused for the scaling cone
    std::array<int, 2> m{0, 0};

    bool operator==(const ShearletIndex&) const = default;
};

struct ShearletIndexHash {
    std::size_t operator()(const ShearletIndex& idx) const noexcept;
};

struct Box {
    Vec2 lo{0.0, 0.0};
    Vec2 hi{0.0, 0.0};

    bool intersects(const Box& other, double tol = 1e-12) const;
    bool contains(const Box& other, double tol = 1e-12) const;
};

/// ceil(2^{j/2}): the largest admissible |k| at scale j.
int shear_bound(int j);

/// Parabolic scaling diag(2^j, 2^{j/2}) (horizontal) or diag(2^{j/2}, 2^j) (vertical).
Eigen::Matrix2d scaling_matrix(int j, Cone cone);

/// S_k A_{2^j} for the horizontal cone, S_k^T A~_{2^j} for the vertical cone,
/// identity for the scaling cone. Atoms are norm * g(B x - m).
Eigen::Matrix2d atom_matrix(const ShearletIndex& idx);

/// 2^{3j/4} for cone atoms, 1 for scaling atoms.
double atom_normalization(const ShearletIndex& idx);

GeneratorKind generator_of(Cone cone);

/// Bounding box of B^{-1}([0,a]^2 + m).
Box support_box(const GeneratorSpec& spec, const ShearletIndex& idx);

/// Atoms sharing (cone, j, k) differ only by translation; the layout keeps
/// this grouping so frequency evaluations can be shared.
struct AtomGroup {
    Cone cone = Cone::Scaling;
    int j = 0;
    int k = 0;
    Eigen::Matrix2d B = Eigen::Matrix2d::Identity();
    Eigen::Matrix2d B_inv = Eigen::Matrix2d::Identity();
    double norm = 1.0;
};

class SystemLayout {
public:
    SystemLayout(int J, GeneratorSpec spec);

    int J() const { return J_; }
    const GeneratorSpec& spec() const { return spec_; }
    const std::vector<ShearletIndex>& indices() const { return indices_; }
    std::size_t size() const { return indices_.size(); }

    std::optional<std::size_t> ordinal(const ShearletIndex& idx) const;
    /// Throws Error(IndexOutOfLayout) when idx is not part of the system.
    std::size_t require(const ShearletIndex& idx) const;

    const std::vector<AtomGroup>& groups() const { return groups_; }
    std::size_t group_of(std::size_t ordinal) const { return group_of_[ordinal]; }
    /// Spatial translation B^{-1} m of atom `ordinal`.
    const Eigen::Vector2d& translation(std::size_t ordinal) const { return translation_[ordinal]; }

    /// Number of atoms at scale j across both cones.
    std::size_t count_at_scale(int j) const;
    /// Bounding box of the union of all atom supports.
    Box hull() const;

    /// Spline factors of phi, psi or psi~, built once per layout.
    const SeparableGenerator& generator(GeneratorKind kind) const {
        return generators_[static_cast<std::size_t>(kind)];
    }

private:
    int J_;
    GeneratorSpec spec_;
    std::vector<ShearletIndex> indices_;
    std::unordered_map<ShearletIndex, std::size_t, ShearletIndexHash> lookup_;
    std::vector<AtomGroup> groups_;
    std::vector<std::size_t> group_of_;
    std::vector<Eigen::Vector2d> translation_;
    std::array<SeparableGenerator, 3> generators_;
};

/// Enumerates every atom at scales 0..J-1 whose support box meets [0,a]^2.
SystemLayout build_layout(int J, const GeneratorSpec& spec);

/// Fourier transform of any atom, whether or not it belongs to a layout.
cplx atom_ft(const GeneratorSpec& spec, const ShearletIndex& idx, Vec2 xi);
cplx atom_ft(const SystemLayout& layout, const ShearletIndex& idx, Vec2 xi);

/// Frequency response of a group without the translation phase.
cplx group_ft(const GeneratorSpec& spec, const AtomGroup& group, Vec2 xi);

double atom_space(const GeneratorSpec& spec, const ShearletIndex& idx, Vec2 x);
double atom_space(const SystemLayout& layout, const ShearletIndex& idx, Vec2 x);

/// CSV with columns ordinal,cone,j,k,m1,m2.
void write_layout_csv(const SystemLayout& layout, std::ostream& out);

} // namespace shgs
