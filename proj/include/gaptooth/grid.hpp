/**
 * @file grid.hpp
 * @brief Two-level staggered geometry of the gap-tooth scheme.
 *
 * The macroscale grid has m equispaced patch centres X_j (spacing D). Patch j
 * covers |x - X_j| < rD and carries a microscale staggered lattice of step
 * d = 2rD/(n+1) with integer slots i in [-(n+1)/2, (n+1)/2]. Slots
 * +-(n+1)/2 are the patch edges; the n slots in between are interior
 * unknowns. Slot (j, i) stores depth when j - i is odd and velocity when
 * j - i is even, so odd patches are depth-centred and even patches are
 * velocity-centred.
 */
#pragma once

#include <optional>
#include <string_view>
#include <vector>

namespace gaptooth {

enum class Topology { Periodic, Bounded };
enum class Field { Depth, Velocity };

Topology parse_topology(std::string_view name);
std::string_view to_string(Topology topology);
std::string_view to_string(Field field);

/// Field stored at micro slot i of patch j (1-based j).
constexpr Field field_parity(int j, int i) {
    const int diff = j - i;
    return (diff % 2 != 0) ? Field::Depth : Field::Velocity;
}

constexpr Field conjugate(Field f) {
    return f == Field::Depth ? Field::Velocity : Field::Depth;
}

class PatchLattice {
public:
    /// Validates and derives D, d and the patch centres.
    ///
    /// centre_offset places X_j = (j + offset) D. It defaults to 0 for
    /// periodic domains and to -1/2 for bounded ones (patches tile [0, L]
    /// symmetrically).
    static PatchLattice build(double domain_length, int patch_count, int interior_points,
                              double ratio, Topology topology,
                              std::optional<double> centre_offset = std::nullopt);

    double domain_length() const { return length_; }
    int patch_count() const { return m_; }
    int interior_points() const { return n_; }
    double ratio() const { return r_; }
    double macro_step() const { return D_; }
    double micro_step() const { return d_; }
    Topology topology() const { return topology_; }
    double centre_offset() const { return offset_; }

    /// Slot index of the right edge, (n+1)/2.
    int edge_slot() const { return (n_ + 1) / 2; }
    /// Largest interior slot, (n-1)/2.
    int interior_half() const { return (n_ - 1) / 2; }

    double centre(int j) const { return centres_.at(static_cast<std::size_t>(j - 1)); }
    const std::vector<double>& centres() const { return centres_; }

    /// Patches overlap their neighbours (r > 1/2). Legal but unusual.
    bool overlapping() const { return r_ > 0.5; }

    /// Wraps a periodic patch index into [1, m]. Identity for in-range indices.
    int wrap(int j) const;
    bool in_range(int j) const { return j >= 1 && j <= m_; }

    Field centre_field(int j) const { return field_parity(j, 0); }
    Field edge_field(int j) const { return field_parity(j, edge_slot()); }

private:
    PatchLattice() = default;

    double length_ = 0.0;
    int m_ = 0;
    int n_ = 0;
    double r_ = 0.0;
    double D_ = 0.0;
    double d_ = 0.0;
    double offset_ = 0.0;
    Topology topology_ = Topology::Periodic;
    std::vector<double> centres_;
};

/// X_j + i d.
double micro_position(const PatchLattice& lattice, int j, int i);

} // namespace gaptooth
