#include "gaptooth/grid.hpp"

#include "gaptooth/errors.hpp"

#include <cmath>
#include <string>

namespace gaptooth {

Topology parse_topology(std::string_view name) {
    if (name == "periodic") return Topology::Periodic;
    if (name == "bounded") return Topology::Bounded;
    throw ConfigError("unknown topology '" + std::string(name) + "' (expected periodic|bounded)");
}

std::string_view to_string(Topology topology) {
    return topology == Topology::Periodic ? "periodic" : "bounded";
}

std::string_view to_string(Field field) {
    return field == Field::Depth ? "h" : "u";
}

PatchLattice PatchLattice::build(double domain_length, int patch_count, int interior_points,
                                 double ratio, Topology topology,
                                 std::optional<double> centre_offset) {
    if (!(domain_length > 0.0) || !std::isfinite(domain_length))
        throw ConfigError("domain length must be positive");
    if (patch_count < 2)
        throw ConfigError("need at least two patches, got m=" + std::to_string(patch_count));
    if (interior_points < 5 || interior_points % 2 == 0)
        throw ConfigError("interior points n must be odd and >= 5, got n=" +
                          std::to_string(interior_points));
    // Edges must carry the field conjugate to the centre: (n+1)/2 odd.
    if (((interior_points + 1) / 2) % 2 == 0)
        throw ConfigError("interior points n must satisfy n = 1 (mod 4) so that patch edges carry "
                          "the conjugate field, got n=" + std::to_string(interior_points));
    if (!(ratio > 0.0) || ratio > 1.0)
        throw ConfigError("patch ratio r must lie in (0, 1]");
    if (topology == Topology::Periodic && patch_count % 2 != 0)
        throw ConfigError("periodic topology needs an even patch count, got m=" +
                          std::to_string(patch_count));

    PatchLattice lat;
    lat.length_ = domain_length;
    lat.m_ = patch_count;
    lat.n_ = interior_points;
    lat.r_ = ratio;
    lat.topology_ = topology;
    lat.D_ = domain_length / patch_count;
    lat.d_ = 2.0 * ratio * lat.D_ / (interior_points + 1);
    lat.offset_ = centre_offset.value_or(topology == Topology::Periodic ? 0.0 : -0.5);
    lat.centres_.reserve(static_cast<std::size_t>(patch_count));
    for (int j = 1; j <= patch_count; ++j)
        lat.centres_.push_back((j + lat.offset_) * lat.D_);
    return lat;
}

int PatchLattice::wrap(int j) const {
    if (topology_ != Topology::Periodic) return j;
    int k = (j - 1) % m_;
    if (k < 0) k += m_;
    return k + 1;
}

double micro_position(const PatchLattice& lattice, int j, int i) {
    const int e = lattice.edge_slot();
    // Edge slots land on X_j +- rD exactly.
    if (i == e) return lattice.centre(j) + lattice.ratio() * lattice.macro_step();
    if (i == -e) return lattice.centre(j) - lattice.ratio() * lattice.macro_step();
    return lattice.centre(j) + i * lattice.micro_step();
}

} // namespace gaptooth
