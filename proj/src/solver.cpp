#include "gaptooth/solver.hpp"

#include "gaptooth/errors.hpp"

#include <cmath>
#include <condition_variable>
#include <exception>
#include <functional>
#include <mutex>
#include <string>
#include <thread>

namespace gaptooth {

// Persistent workers running index ranges of one job at a time. Each index
// writes a disjoint output block, so the schedule never affects results.
class WorkerPool {
public:
    explicit WorkerPool(unsigned threads) {
        for (unsigned t = 1; t < threads; ++t) workers_.emplace_back([this, t] { loop(t); });
        count_ = threads;
    }

    ~WorkerPool() {
        {
            std::lock_guard lock(mutex_);
            stop_ = true;
        }
        wake_.notify_all();
        for (auto& w : workers_) w.join();
    }

    void run(int tasks, const std::function<void(int)>& fn) {
        {
            std::lock_guard lock(mutex_);
            job_ = &fn;
            tasks_ = tasks;
            pending_ = count_ - 1;
            errors_.assign(count_, nullptr);
            ++generation_;
        }
        wake_.notify_all();
        work(0);
        std::unique_lock lock(mutex_);
        done_.wait(lock, [this] { return pending_ == 0; });
        job_ = nullptr;
        for (auto& e : errors_)
            if (e) std::rethrow_exception(e);
    }

private:
    void work(unsigned slot) {
        try {
            for (int k = static_cast<int>(slot); k < tasks_; k += static_cast<int>(count_)) (*job_)(k);
        } catch (...) {
            errors_[slot] = std::current_exception();
        }
    }

    void loop(unsigned slot) {
        std::size_t seen = 0;
        for (;;) {
            {
                std::unique_lock lock(mutex_);
                wake_.wait(lock, [&] { return stop_ || generation_ != seen; });
                if (stop_) return;
                seen = generation_;
            }
            work(slot);
            {
                std::lock_guard lock(mutex_);
                --pending_;
            }
            done_.notify_one();
        }
    }

    std::vector<std::thread> workers_;
    unsigned count_ = 1;
    std::mutex mutex_;
    std::condition_variable wake_, done_;
    const std::function<void(int)>* job_ = nullptr;
    int tasks_ = 0;
    unsigned pending_ = 0;
    std::size_t generation_ = 0;
    bool stop_ = false;
    std::vector<std::exception_ptr> errors_;
};

MacroValues gather_macro(std::span<const double> state, const PatchLattice& lattice) {
    const StateLayout layout(lattice);
    if (state.size() != layout.size()) throw ConfigError("state size does not match the lattice");
    MacroValues macro;
    macro.values.resize(static_cast<std::size_t>(lattice.patch_count()));
    for (int j = 1; j <= lattice.patch_count(); ++j)
        macro.values[static_cast<std::size_t>(j - 1)] = state[layout.index(j, 0)];
    return macro;
}

EndCondition parse_end_condition(std::string_view text) {
    EndCondition end;
    std::string_view body = text;
    if (const auto at = text.find('@'); at != std::string_view::npos) {
        const auto site = text.substr(at + 1);
        body = text.substr(0, at);
        if (site == "centre" || site == "center") end.site = EndSite::PatchCentre;
        else if (site == "edge") end.site = EndSite::PatchEdge;
        else throw ConfigError("unknown boundary site '" + std::string(site) + "'");
    }
    if (body == "zero_velocity") end.kind = EndKind::ZeroVelocity;
    else if (body == "no_flux") end.kind = EndKind::NoFlux;
    else if (body == "fictitious_zero") end.kind = EndKind::FictitiousZeroPatch;
    else if (body.starts_with("constant_depth")) {
        end.kind = EndKind::ConstantDepth;
        const auto colon = body.find(':');
        if (colon != std::string_view::npos) {
            try {
                end.value = std::stod(std::string(body.substr(colon + 1)));
            } catch (const std::exception&) {
                throw ConfigError("bad constant depth in '" + std::string(text) + "'");
            }
        }
        if (!(end.value > 0.0)) throw ConfigError("constant depth must be positive");
    } else {
        throw ConfigError("unknown boundary condition '" + std::string(text) + "'");
    }
    return end;
}

std::string format_end_condition(const EndCondition& end) {
    std::string out;
    switch (end.kind) {
    case EndKind::ZeroVelocity: out = "zero_velocity"; break;
    case EndKind::NoFlux: out = "no_flux"; break;
    case EndKind::FictitiousZeroPatch: out = "fictitious_zero"; break;
    case EndKind::ConstantDepth: out = "constant_depth:" + std::to_string(end.value); break;
    }
    out += end.site == EndSite::PatchCentre ? "@centre" : "@edge";
    return out;
}

GhostClosure parse_ghost_closure(std::string_view name) {
    if (name == "linear_extrapolate") return GhostClosure::LinearExtrapolate;
    if (name == "macro_interpolate") return GhostClosure::MacroInterpolate;
    if (name == "copy_inner") return GhostClosure::CopyInner;
    throw ConfigError("unknown ghost closure '" + std::string(name) + "'");
}

std::string_view to_string(GhostClosure closure) {
    switch (closure) {
    case GhostClosure::LinearExtrapolate: return "linear_extrapolate";
    case GhostClosure::MacroInterpolate: return "macro_interpolate";
    case GhostClosure::CopyInner: return "copy_inner";
    }
    return "?";
}

namespace {

bool pins_centre(const EndCondition& end) { return end.site == EndSite::PatchCentre; }

double pinned_value(const EndCondition& end) {
    return end.kind == EndKind::ZeroVelocity ? 0.0 : end.value;
}

void check_centre_site(const EndCondition& end, const PatchLattice& lattice, int j) {
    if (!pins_centre(end)) return;
    const Field centre = lattice.centre_field(j);
    if (end.kind == EndKind::ZeroVelocity && centre == Field::Velocity) return;
    if (end.kind == EndKind::ConstantDepth && centre == Field::Depth) return;
    throw ConfigError("boundary condition " + format_end_condition(end) +
                      " cannot pin the centre of patch " + std::to_string(j));
}

} // namespace

GapToothSolver::GapToothSolver(PatchLattice lattice, CouplingScheme scheme,
                               std::shared_ptr<const WaveSystem> system, BoundarySpec bc,
                               GhostClosure closure, unsigned threads)
    : lattice_(std::move(lattice)), scheme_(scheme), system_(std::move(system)), bc_(bc),
      closure_(closure) {
    if (!system_) throw ConfigError("gap-tooth solver needs a wave system");
    scheme_.ratio = lattice_.ratio();
    if (system_->reach() > 2 && lattice_.edge_slot() < 2)
        throw ConfigError("patch too small for a reach-3 stencil");
    if (lattice_.topology() == Topology::Bounded) {
        check_centre_site(bc_.left, lattice_, 1);
        check_centre_site(bc_.right, lattice_, lattice_.patch_count());
    }

    const int e = lattice_.edge_slot();
    const int q = (degree(scheme_.order) + 1) / 2;
    const double d = lattice_.micro_step();
    const auto fict = rule();
    const StencilWeights edge[2] = {stencil_weights(scheme_, Side::Minus, 1.0),
                                    stencil_weights(scheme_, Side::Plus, 1.0)};
    const double xi_far = static_cast<double>(e + 2) / e;
    const StencilWeights far[2] = {stencil_weights(scheme_, Side::Plus, -xi_far),
                                   stencil_weights(scheme_, Side::Plus, xi_far)};
    for (int j = 1; j <= lattice_.patch_count(); ++j) {
        PatchPlan plan;
        for (int side = 0; side < 2; ++side) {
            const int s = side == 0 ? -1 : 1;
            plan.edge[side] = resolve_stencil(edge[side], lattice_, j, fict);
            plan.far[side] = resolve_stencil(far[side], lattice_, j, fict);
            if (closure_ == GhostClosure::MacroInterpolate)
                if (const auto w = own_field_weights(lattice_, j, s * (e + 1) * d, q))
                    plan.own[side] = resolve_stencil(*w, lattice_, j, std::nullopt);
        }
        plans_.push_back(std::move(plan));
    }
    if (threads > 1) pool_ = std::make_unique<WorkerPool>(threads);
}

GapToothSolver::~GapToothSolver() = default;
GapToothSolver::GapToothSolver(GapToothSolver&&) noexcept = default;
GapToothSolver& GapToothSolver::operator=(GapToothSolver&&) noexcept = default;

std::optional<FictitiousRule> GapToothSolver::rule() const {
    if (lattice_.topology() == Topology::Periodic) return std::nullopt;
    return bc_.fictitious;
}

void GapToothSolver::fill_window(std::span<const double> state, const MacroValues& macro, int j,
                                 PatchFields& w) const {
    const int e = lattice_.edge_slot();
    const int half = lattice_.interior_half();
    const int reach = system_->reach();
    const int W = e + reach - 1;
    if (w.base() != j || w.lo() != -W || w.hi() != W) w.reset(j, -W, W);

    const StateLayout layout(lattice_);
    const std::size_t start = layout.index(j, -half);
    for (int i = -half; i <= half; ++i) w[i] = state[start + static_cast<std::size_t>(i + half)];
    w[0] = macro(j); // equals the state except where a boundary pins the centre

    const PatchPlan& plan = plans_[static_cast<std::size_t>(j - 1)];
    w[-e] = plan.edge[0].apply(macro);
    w[e] = plan.edge[1].apply(macro);

    for (int side = 0; side < 2; ++side) {
        const int s = side == 0 ? -1 : 1;
        const int g = s * (e + 1);
        const double outer = w[s * (e - 1)];
        const double inner = w[s * (e - 3)];
        switch (closure_) {
        case GhostClosure::LinearExtrapolate: w[g] = 2.0 * outer - inner; break;
        case GhostClosure::CopyInner: w[g] = outer; break;
        case GhostClosure::MacroInterpolate:
            w[g] = plan.own[side] ? plan.own[side]->apply(macro) : 2.0 * outer - inner;
            break;
        }
        if (reach >= 3) w[s * (e + 2)] = plan.far[side].apply(macro);
    }

    if (lattice_.topology() == Topology::Bounded) {
        if (j == 1) apply_end(bc_.left, false, macro, j, w);
        if (j == lattice_.patch_count()) apply_end(bc_.right, true, macro, j, w);
    }
}

void GapToothSolver::apply_end(const EndCondition& end, bool right, const MacroValues& macro,
                               int j, PatchFields& w) const {
    if (end.site == EndSite::PatchCentre) return; // handled through the macro values
    const int s = right ? 1 : -1;
    const int e = lattice_.edge_slot();
    const bool far = system_->reach() >= 3;
    const int E = s * e, G = s * (e + 1), G2 = s * (e + 2);
    const double inner_edge_field = w[s * (e - 2)];
    const double inner_conj = w[s * (e - 1)];
    const bool velocity_edge = w.field(E) == Field::Velocity;

    switch (end.kind) {
    case EndKind::ZeroVelocity:
        // Wall at the outer edge: velocity odd, depth even about it.
        if (velocity_edge) {
            w[E] = 0.0;
            w[G] = inner_conj;
            if (far) w[G2] = -inner_edge_field;
        } else {
            w[E] = inner_edge_field;
            w[G] = -inner_conj;
            if (far) w[G2] = inner_edge_field;
        }
        break;
    case EndKind::NoFlux:
        w[E] = inner_edge_field;
        w[G] = inner_conj;
        if (far) w[G2] = inner_edge_field;
        break;
    case EndKind::ConstantDepth:
        if (velocity_edge) {
            w[E] = inner_edge_field;
            w[G] = 2.0 * end.value - inner_conj;
            if (far) w[G2] = inner_edge_field;
        } else {
            w[E] = end.value;
            w[G] = inner_conj;
            if (far) w[G2] = 2.0 * end.value - inner_edge_field;
        }
        break;
    case EndKind::FictitiousZeroPatch: {
        // Both edges of the end patch take the neighbouring macro value.
        const double v = macro(j - s);
        w[-e] = v;
        w[e] = v;
        break;
    }
    }
}

PatchFields GapToothSolver::patch_window(std::span<const double> state, int j) const {
    MacroValues macro = gather_macro(state, lattice_);
    if (lattice_.topology() == Topology::Bounded) {
        if (pins_centre(bc_.left)) macro.values.front() = pinned_value(bc_.left);
        if (pins_centre(bc_.right)) macro.values.back() = pinned_value(bc_.right);
    }
    PatchFields w;
    fill_window(state, macro, j, w);
    return w;
}

void GapToothSolver::rhs(std::span<const double> state, double, std::span<double> dydt) const {
    const StateLayout layout(lattice_);
    if (state.size() != layout.size() || dydt.size() != layout.size())
        throw ConfigError("state size does not match the lattice");
    const int m = lattice_.patch_count();
    const int n = lattice_.interior_points();
    const int half = lattice_.interior_half();
    const double d = lattice_.micro_step();

    MacroValues macro = gather_macro(state, lattice_);
    const bool bounded = lattice_.topology() == Topology::Bounded;
    if (bounded) {
        if (pins_centre(bc_.left)) macro.values.front() = pinned_value(bc_.left);
        if (pins_centre(bc_.right)) macro.values.back() = pinned_value(bc_.right);
    }

    auto patch = [&](int k) {
        const int j = k + 1;
        thread_local PatchFields window;
        try {
            fill_window(state, macro, j, window);
            system_->evaluate(window, d, -half, half,
                              dydt.subspan(static_cast<std::size_t>(k) * static_cast<std::size_t>(n),
                                           static_cast<std::size_t>(n)));
        } catch (const NumericalError& err) {
            throw NumericalError("patch " + std::to_string(j) + ": " + err.what());
        }
    };
    if (pool_) {
        pool_->run(m, patch);
    } else {
        for (int k = 0; k < m; ++k) patch(k);
    }

    if (bounded) {
        if (pins_centre(bc_.left)) dydt[layout.index(1, 0)] = 0.0;
        if (pins_centre(bc_.right)) dydt[layout.index(m, 0)] = 0.0;
    }
}

std::vector<double> GapToothSolver::rhs(std::span<const double> state, double t) const {
    std::vector<double> out(state.size());
    rhs(state, t, out);
    return out;
}

FullDomainSolver::FullDomainSolver(double domain_length, double micro_step, Topology topology,
                                   std::shared_ptr<const WaveSystem> system, BoundarySpec bc)
    : L_(domain_length), d_(micro_step), topology_(topology), system_(std::move(system)), bc_(bc) {
    if (!system_) throw ConfigError("full-domain solver needs a wave system");
    if (!(L_ > 0.0) || !(d_ > 0.0)) throw ConfigError("domain length and micro step must be positive");
    const double ratio = L_ / d_;
    K_ = static_cast<int>(std::lround(ratio));
    if (std::abs(ratio - K_) > 1e-8 * ratio)
        throw ConfigError("domain length must be a whole number of micro steps");
    if (K_ % 2 != 0 || K_ < 8) throw ConfigError("full domain needs an even number (>= 8) of micro steps");
}

std::size_t FullDomainSolver::size() const {
    return static_cast<std::size_t>(topology_ == Topology::Periodic ? K_ : K_ - 1);
}

void FullDomainSolver::fill_end(const EndCondition& end, bool right, PatchFields& w) const {
    const int wall = right ? K_ : 0;
    const int s = right ? 1 : -1;
    double depth_sign = 1.0, depth_shift = 0.0, velocity_sign = 1.0;
    switch (end.kind) {
    case EndKind::ZeroVelocity: velocity_sign = -1.0; break;
    case EndKind::ConstantDepth: depth_sign = -1.0; depth_shift = 2.0 * end.value; break;
    case EndKind::NoFlux:
    case EndKind::FictitiousZeroPatch: break; // zero-gradient outflow
    }
    w[wall] = velocity_sign < 0.0 ? 0.0 : w[wall - 2 * s];
    for (int t = 1; t <= 3; ++t) {
        const int inside = wall - s * t, ghost = wall + s * t;
        if (w.field(ghost) == Field::Depth) w[ghost] = depth_shift + depth_sign * w[inside];
        else w[ghost] = velocity_sign * w[inside];
    }
}

PatchFields FullDomainSolver::window(std::span<const double> state) const {
    if (state.size() != size()) throw ConfigError("state size does not match the full domain");
    if (topology_ == Topology::Periodic) {
        PatchFields w(0, -3, K_ + 2);
        for (int k = -3; k <= K_ + 2; ++k) w[k] = state[static_cast<std::size_t>(((k % K_) + K_) % K_)];
        return w;
    }
    PatchFields w(0, -3, K_ + 3);
    for (int k = 1; k < K_; ++k) w[k] = state[static_cast<std::size_t>(k - 1)];
    fill_end(bc_.left, false, w);
    fill_end(bc_.right, true, w);
    return w;
}

void FullDomainSolver::rhs(std::span<const double> state, double, std::span<double> dydt) const {
    if (dydt.size() != size()) throw ConfigError("derivative size does not match the full domain");
    const PatchFields w = window(state);
    const int first = first_slot();
    const int last = first + static_cast<int>(size()) - 1;
    system_->evaluate(w, d_, first, last, dydt);
}

std::vector<double> FullDomainSolver::rhs(std::span<const double> state, double t) const {
    std::vector<double> out(size());
    rhs(state, t, out);
    return out;
}

} // namespace gaptooth
