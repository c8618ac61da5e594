/**
 * @file solver.hpp
 * @brief Assembly of the gap-tooth and full-domain right-hand sides.
 *
 * Each gap-tooth evaluation runs in two phases. The exchange phase gathers
 * the macroscale values (centre slots), interpolates patch edge values and
 * fills ghost slots. The patch phase then evaluates the model on every patch
 * independently, optionally across worker threads. Results never depend on
 * the thread count.
 */
#pragma once

#include "gaptooth/coupling.hpp"
#include "gaptooth/grid.hpp"
#include "gaptooth/models.hpp"

#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace gaptooth {

/// Flat layout of the m*n gap-tooth interior unknowns, patch-major.
class StateLayout {
public:
    explicit StateLayout(const PatchLattice& lattice)
        : m_(lattice.patch_count()), n_(lattice.interior_points()), half_(lattice.interior_half()) {}

    std::size_t size() const { return static_cast<std::size_t>(m_) * static_cast<std::size_t>(n_); }
    /// Linear index of (patch j, interior slot i), 1-based j, |i| <= (n-1)/2.
    std::size_t index(int j, int i) const {
        return static_cast<std::size_t>(j - 1) * static_cast<std::size_t>(n_) +
               static_cast<std::size_t>(i + half_);
    }
    int patch_of(std::size_t k) const { return static_cast<int>(k / static_cast<std::size_t>(n_)) + 1; }
    int slot_of(std::size_t k) const { return static_cast<int>(k % static_cast<std::size_t>(n_)) - half_; }

private:
    int m_, n_, half_;
};

/// Centre-slot values: H_j for odd j, U_j for even j.
MacroValues gather_macro(std::span<const double> state, const PatchLattice& lattice);

enum class EndKind { ConstantDepth, NoFlux, ZeroVelocity, FictitiousZeroPatch };
enum class EndSite { PatchEdge, PatchCentre };

struct EndCondition {
    EndKind kind = EndKind::NoFlux;
    EndSite site = EndSite::PatchEdge;
    double value = 1.0; // depth for ConstantDepth
};

/// Parses "zero_velocity", "no_flux", "fictitious_zero", "constant_depth:<v>",
/// each optionally suffixed "@centre" or "@edge".
EndCondition parse_end_condition(std::string_view text);
std::string format_end_condition(const EndCondition& end);

struct BoundarySpec {
    EndCondition left{EndKind::ZeroVelocity, EndSite::PatchEdge, 1.0};
    EndCondition right{EndKind::FictitiousZeroPatch, EndSite::PatchEdge, 1.0};
    FictitiousRule fictitious = FictitiousRule::Zero;
};

enum class GhostClosure { LinearExtrapolate, MacroInterpolate, CopyInner };

GhostClosure parse_ghost_closure(std::string_view name);
std::string_view to_string(GhostClosure closure);

class WorkerPool;

class GapToothSolver {
public:
    GapToothSolver(PatchLattice lattice, CouplingScheme scheme, std::shared_ptr<const WaveSystem> system,
                   BoundarySpec bc = {}, GhostClosure closure = GhostClosure::MacroInterpolate,
                   unsigned threads = 1);
    ~GapToothSolver();
    GapToothSolver(GapToothSolver&&) noexcept;
    GapToothSolver& operator=(GapToothSolver&&) noexcept;

    const PatchLattice& lattice() const { return lattice_; }
    const CouplingScheme& scheme() const { return scheme_; }
    const WaveSystem& system() const { return *system_; }
    const BoundarySpec& boundary() const { return bc_; }
    GhostClosure closure() const { return closure_; }
    StateLayout layout() const { return StateLayout(lattice_); }
    std::size_t size() const { return layout().size(); }

    void rhs(std::span<const double> state, double t, std::span<double> dydt) const;
    std::vector<double> rhs(std::span<const double> state, double t = 0.0) const;

    /// Window of patch j after the exchange phase (edges and ghosts filled).
    PatchFields patch_window(std::span<const double> state, int j) const;

private:
    void fill_window(std::span<const double> state, const MacroValues& macro, int j,
                     PatchFields& window) const;
    void apply_end(const EndCondition& end, bool right, const MacroValues& macro, int j,
                   PatchFields& window) const;
    std::optional<FictitiousRule> rule() const;

    // Exchange-phase stencils of one patch, precomputed at construction.
    struct PatchPlan {
        MacroStencil edge[2];                // left, right
        MacroStencil far[2];                 // conjugate ghosts at +-(e+2)
        std::optional<MacroStencil> own[2];  // own-field ghosts at +-(e+1)
    };

    PatchLattice lattice_;
    CouplingScheme scheme_;
    std::shared_ptr<const WaveSystem> system_;
    BoundarySpec bc_;
    GhostClosure closure_;
    std::vector<PatchPlan> plans_;
    std::unique_ptr<WorkerPool> pool_;
};

/// One long patch over the whole domain with the same micro step. Slot k sits
/// at x = k d; velocity at even k, depth at odd k. Periodic domains store
/// k = 0..K-1; bounded ones store k = 1..K-1 with walls at k = 0 and k = K.
class FullDomainSolver {
public:
    FullDomainSolver(double domain_length, double micro_step, Topology topology,
                     std::shared_ptr<const WaveSystem> system, BoundarySpec bc = {});

    double micro_step() const { return d_; }
    int slot_count() const { return K_; }
    Topology topology() const { return topology_; }
    std::size_t size() const;
    int first_slot() const { return topology_ == Topology::Periodic ? 0 : 1; }
    double position(std::size_t k) const { return (static_cast<int>(k) + first_slot()) * d_; }
    Field field(std::size_t k) const {
        return ((static_cast<int>(k) + first_slot()) % 2 != 0) ? Field::Depth : Field::Velocity;
    }

    void rhs(std::span<const double> state, double t, std::span<double> dydt) const;
    std::vector<double> rhs(std::span<const double> state, double t = 0.0) const;

    /// Full slot window including walls and ghosts.
    PatchFields window(std::span<const double> state) const;

private:
    void fill_end(const EndCondition& end, bool right, PatchFields& w) const;

    double L_, d_;
    int K_;
    Topology topology_;
    std::shared_ptr<const WaveSystem> system_;
    BoundarySpec bc_;
};

} // namespace gaptooth
