#include "torusflow/horseshoe.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <queue>
#include <thread>
#include <utility>

namespace torusflow {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kSqrt2 = std::numbers::sqrt2;
} // namespace

void validate_ball(const TorusBall& b) {
    if (!(b.radius > 0.0) || !(b.radius < kPi))
        throw validation_error("ball radius must lie in (0, pi), got " +
                               std::to_string(b.radius));
}

void validate_balls(const BallPair& balls) {
    validate_ball(balls.first);
    validate_ball(balls.second);
    const double d = torus_distance(balls.first.center, balls.second.center);
    if (!(d > balls.first.radius + balls.second.radius))
        throw validation_error("balls must be disjoint: center distance " +
                               std::to_string(d) + " <= radii sum " +
                               std::to_string(balls.first.radius + balls.second.radius));
}

void validate_word(const ItineraryWord& w) {
    if (w.indices.empty() || w.indices.size() > static_cast<std::size_t>(kMaxItinerary))
        throw validation_error("itinerary needs between 1 and " +
                               std::to_string(kMaxItinerary) + " indices");
    if (w.symbols.size() != w.indices.size())
        throw validation_error("itinerary symbols must pair with indices");
    if (w.indices.front() < 0)
        throw validation_error("itinerary indices must be non-negative");
    for (std::size_t i = 1; i < w.indices.size(); ++i)
        if (w.indices[i] <= w.indices[i - 1])
            throw validation_error("itinerary indices must be strictly increasing");
    for (std::uint8_t s : w.symbols)
        if (s != 1 && s != 2)
            throw validation_error("itinerary symbols must be 1 or 2");
    if (!(w.tau > 0.0)) throw validation_error("itinerary time quantum must be positive");
}

namespace {

std::int64_t segments_per_tau(const TrajectoryView& tr, double tau) {
    const double dt = tr.dt();
    const auto steps = static_cast<std::int64_t>(std::llround(tau / dt));
    if (steps < 1 || std::fabs(steps * dt - tau) > 1e-9 * std::max(1.0, tau))
        throw validation_error("tau must be a positive multiple of the trajectory step " +
                               std::to_string(dt));
    return steps;
}

const TorusBall& target_ball(const BallPair& balls, std::uint8_t symbol) {
    return symbol == 1 ? balls.first : balls.second;
}

struct Cell {
    TorusPoint center;
    double half = 0.0;
    int depth = 0;
    std::int32_t first_child = -1;
    std::array<TorusPoint, kMaxItinerary> images{};
    std::array<double, kMaxItinerary> lip{};
};

enum class CellClass { accept, reject, split };

// Shared quadtree search over initial conditions.  Words move in depth
// lockstep: every active frontier holds cells of the current generation, so a
// node is expanded at most once and orbit data is shared across all words.
class Engine {
public:
    Engine(const BallPair& balls, const std::vector<int>& indices, double tau,
           const FlowOracle& oracle, const SearchBudget& budget)
        : balls_(balls), indices_(indices), oracle_(oracle), budget_(budget) {
        validate_balls(balls_);
        ItineraryWord probe{indices, std::vector<std::uint8_t>(indices.size(), 1), tau};
        validate_word(probe);
        if (oracle_.trajectory == nullptr)
            throw validation_error("flow oracle has no trajectory");
        if (oracle_.segment_origin < 0)
            throw validation_error("flow oracle segment origin must be non-negative");
        steps_ = segments_per_tau(*oracle_.trajectory, tau);
        const std::int64_t last =
            oracle_.segment_origin + static_cast<std::int64_t>(indices_.back()) * steps_;
        if (last > oracle_.trajectory->segments())
            throw validation_error("trajectory too short for the itinerary window");
        if (budget_.max_cells < 1 || budget_.max_depth < 0 || budget_.workers < 1)
            throw validation_error("search budget needs max_cells >= 1, max_depth >= 0, "
                                   "workers >= 1");
    }

    void run(const std::vector<std::vector<std::uint8_t>>& words,
             std::vector<WordReport>& out);

    std::int64_t cells() const { return static_cast<std::int64_t>(nodes_.size()); }
    int deepest() const { return deepest_; }

private:
    void evaluate_from(std::size_t first);
    void advect_span(std::int64_t s0, std::int64_t s1, std::vector<OrbitProbe>& probes);
    CellClass classify(const Cell& c, const std::vector<std::uint8_t>& sym,
                       double* cost) const;
    CellCertificate make_certificate(const Cell& c,
                                     const std::vector<std::uint8_t>& sym) const;

    const BallPair& balls_;
    const std::vector<int>& indices_;
    FlowOracle oracle_;
    SearchBudget budget_;
    std::int64_t steps_ = 0;
    std::vector<Cell> nodes_;
    int deepest_ = 0;
};

void Engine::advect_span(std::int64_t s0, std::int64_t s1, std::vector<OrbitProbe>& probes) {
    if (s0 == s1 || probes.empty()) return;
    const int workers = budget_.workers;
    if (workers <= 1 || probes.size() < 256) {
        advect_batch(*oracle_.trajectory, s0, s1, std::span<OrbitProbe>(probes),
                     oracle_.options, true);
        return;
    }
    const std::size_t chunk = (probes.size() + workers - 1) / workers;
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        const std::size_t a = static_cast<std::size_t>(w) * chunk;
        if (a >= probes.size()) break;
        const std::size_t b = std::min(probes.size(), a + chunk);
        pool.emplace_back([this, s0, s1, a, b, &probes, &errors, w] {
            try {
                advect_batch(*oracle_.trajectory, s0, s1,
                             std::span<OrbitProbe>(probes.data() + a, b - a),
                             oracle_.options, true);
            } catch (...) {
                errors[static_cast<std::size_t>(w)] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

void Engine::evaluate_from(std::size_t first) {
    const std::size_t count = nodes_.size() - first;
    if (count == 0) return;
    std::vector<OrbitProbe> probes(count);
    for (std::size_t i = 0; i < count; ++i)
        probes[i] = {nodes_[first + i].center, Mat2::identity()};
    std::int64_t seg = oracle_.segment_origin;
    for (std::size_t ji = 0; ji < indices_.size(); ++ji) {
        const std::int64_t target =
            oracle_.segment_origin + static_cast<std::int64_t>(indices_[ji]) * steps_;
        advect_span(seg, target, probes);
        seg = target;
        for (std::size_t i = 0; i < count; ++i) {
            Cell& c = nodes_[first + i];
            c.images[ji] = probes[i].x;
            c.lip[ji] = kLipschitzSafety * probes[i].jacobian.opnorm();
        }
    }
}

// Classifies a cell against one word.  For split cells, *cost (when non-null)
// receives an optimistic refinement cost: the number of halvings needed until
// every padded image fits its target assuming the center images stay put
// (pads halve per split), with a large additive penalty when some center
// image is already outside its target and only a sibling shift could fix it.
CellClass Engine::classify(const Cell& c, const std::vector<std::uint8_t>& sym,
                           double* cost) const {
    constexpr double kGeomPenalty = 64.0;
    const double hd = c.half * kSqrt2;
    bool inside = true;
    double worst = 0.0;
    for (std::size_t i = 0; i < indices_.size(); ++i) {
        const TorusBall& b = target_ball(balls_, sym[i]);
        const double d = torus_distance(c.images[i], b.center);
        const double pad = c.lip[i] * hd;
        if (!std::isfinite(d) || !std::isfinite(pad)) {
            if (cost) *cost = std::numeric_limits<double>::infinity();
            return CellClass::split;
        }
        if (d - pad > b.radius) return CellClass::reject;
        inside = inside && (d + pad <= b.radius);
        if (cost) {
            const double s = d < b.radius
                                 ? std::max(0.0, std::log2(pad / (b.radius - d)))
                                 : kGeomPenalty + (d - b.radius);
            worst = std::max(worst, s);
        }
    }
    if (cost) *cost = worst;
    return inside ? CellClass::accept : CellClass::split;
}

CellCertificate Engine::make_certificate(const Cell& c,
                                         const std::vector<std::uint8_t>& sym) const {
    CellCertificate cert;
    cert.point = c.center;
    cert.half_width = c.half;
    cert.depth = c.depth;
    const double hd = c.half * kSqrt2;
    for (std::size_t i = 0; i < indices_.size(); ++i) {
        const TorusBall& b = target_ball(balls_, sym[i]);
        cert.margins.push_back(b.radius - torus_distance(c.images[i], b.center) -
                               c.lip[i] * hd);
        cert.lipschitz.push_back(c.lip[i]);
        cert.images.push_back(c.images[i]);
    }
    return cert;
}

struct WordTrack {
    const std::vector<std::uint8_t>* sym = nullptr;
    WordReport* rep = nullptr;
    bool done = false;
    std::int64_t live = 0;       // undecided cells still eligible for refinement
    std::int64_t abandoned = 0;  // undecided cells stranded at the depth limit
    bool cut_depth = false;
};

// Refinement proceeds best-first: each undecided cell carries its cheapest
// optimistic refinement cost over the words it might still satisfy, and the
// cheapest cells are split first.  This concentrates the cell-orbit budget on
// regions that are simultaneously close to the itinerary targets and
// low-stretch, instead of refining the whole undecided set in lockstep.  Ties
// break on cell id, so reports stay a pure function of (trajectory, balls,
// indices, budget) regardless of worker count.
void Engine::run(const std::vector<std::vector<std::uint8_t>>& words,
                 std::vector<WordReport>& out) {
    out.assign(words.size(), WordReport{});
    nodes_.clear();
    nodes_.push_back(Cell{TorusPoint{kPi, kPi}, kPi, 0, -1, {}, {}});

    std::vector<WordTrack> tracks(words.size());
    std::size_t active = words.size();
    for (std::size_t i = 0; i < words.size(); ++i) {
        out[i].symbols = words[i];
        tracks[i].sym = &words[i];
        tracks[i].rep = &out[i];
    }

    using QueueEntry = std::pair<double, std::int32_t>;  // (violation key, cell id)
    std::priority_queue<QueueEntry, std::vector<QueueEntry>, std::greater<>> queue;

    // Classify one freshly evaluated cell against every active word: certify
    // first accepts, tally undecided cells, and enqueue the cell under its
    // best (smallest) violation when at least one word still needs it split.
    auto absorb = [&](std::int32_t id) {
        const Cell& c = nodes_[static_cast<std::size_t>(id)];
        double key = std::numeric_limits<double>::infinity();
        bool wanted = false;
        for (auto& t : tracks) {
            if (t.done) continue;
            t.rep->depth_reached = std::max(t.rep->depth_reached, c.depth);
            double v = 0.0;
            const CellClass cls = classify(c, *t.sym, &v);
            if (cls == CellClass::accept) {
                t.rep->status = WordStatus::certified;
                t.rep->certificate = make_certificate(c, *t.sym);
                t.done = true;
                --active;
                continue;
            }
            if (cls != CellClass::split) continue;
            if (c.depth >= budget_.max_depth) {
                ++t.abandoned;
                t.cut_depth = true;
            } else {
                ++t.live;
                wanted = true;
                key = std::min(key, v);
            }
        }
        if (wanted) queue.push({key, id});
    };

    // A word settles once no refinable cell is undecided on it: everywhere
    // rejected means excluded; otherwise only the depth limit stopped it.
    auto settle_drained = [&] {
        for (auto& t : tracks) {
            if (t.done || t.live > 0) continue;
            if (t.abandoned > 0) {
                t.rep->status = WordStatus::exhausted;
                t.rep->failure = "depth";
                t.rep->frontier_size = t.abandoned;
            } else {
                t.rep->status = WordStatus::excluded;
            }
            t.done = true;
            --active;
        }
    };

    evaluate_from(0);
    absorb(0);
    settle_drained();

    constexpr std::size_t kRefineBatch = 256;  // cells split per generation
    while (active > 0 && !queue.empty()) {
        const std::int64_t room = budget_.max_cells - cells();
        if (room < 4) break;
        const std::size_t quota =
            std::min<std::size_t>(kRefineBatch, static_cast<std::size_t>(room / 4));

        // Pop the cheapest still-relevant cells.  An entry is stale when every
        // word that was undecided on its cell has since settled.
        std::vector<std::int32_t> chosen;
        chosen.reserve(quota);
        while (chosen.size() < quota && !queue.empty()) {
            const std::int32_t id = queue.top().second;
            queue.pop();
            const Cell& c = nodes_[static_cast<std::size_t>(id)];
            bool relevant = false;
            for (auto& t : tracks) {
                if (t.done) continue;
                if (classify(c, *t.sym, nullptr) == CellClass::split) {
                    --t.live;
                    relevant = true;
                }
            }
            if (relevant) chosen.push_back(id);
        }
        if (chosen.empty()) break;

        const std::size_t first_new = nodes_.size();
        for (std::int32_t id : chosen) {
            const TorusPoint pc = nodes_[static_cast<std::size_t>(id)].center;
            const double h = nodes_[static_cast<std::size_t>(id)].half * 0.5;
            const int d = nodes_[static_cast<std::size_t>(id)].depth + 1;
            nodes_[static_cast<std::size_t>(id)].first_child =
                static_cast<std::int32_t>(nodes_.size());
            for (int q = 0; q < 4; ++q) {
                const double sx = (q & 1) ? h : -h;
                const double sy = (q & 2) ? h : -h;
                nodes_.push_back(Cell{TorusPoint::wrapped(pc.x1 + sx, pc.x2 + sy), h, d,
                                      -1, {}, {}});
            }
            deepest_ = std::max(deepest_, d);
        }
        evaluate_from(first_new);
        for (std::size_t id = first_new; id < nodes_.size(); ++id)
            absorb(static_cast<std::int32_t>(id));
        settle_drained();
    }

    // Whatever is still undecided ran out of cell-orbit budget.
    for (auto& t : tracks) {
        if (t.done) continue;
        t.rep->status = WordStatus::exhausted;
        t.rep->failure = "budget";
        t.rep->frontier_size = t.live + t.abandoned;
        t.done = true;
        --active;
    }
}

} // namespace

WordReport realize_word(const BallPair& balls, const ItineraryWord& word,
                        const FlowOracle& oracle, const SearchBudget& budget) {
    validate_word(word);
    Engine eng(balls, word.indices, word.tau, oracle, budget);
    const std::vector<std::vector<std::uint8_t>> words{word.symbols};
    std::vector<WordReport> reps;
    eng.run(words, reps);
    return std::move(reps.front());
}

HorseshoeReport certify_full_horseshoe(const BallPair& balls,
                                       const std::vector<int>& indices, double tau,
                                       const FlowOracle& oracle,
                                       const SearchBudget& budget) {
    Engine eng(balls, indices, tau, oracle, budget);
    const std::size_t m = indices.size();
    std::vector<std::vector<std::uint8_t>> words(std::size_t{1} << m,
                                                 std::vector<std::uint8_t>(m));
    for (std::size_t b = 0; b < words.size(); ++b)
        for (std::size_t i = 0; i < m; ++i)
            words[b][i] = static_cast<std::uint8_t>(1 + ((b >> (m - 1 - i)) & 1));

    HorseshoeReport rep;
    rep.balls = balls;
    rep.indices = indices;
    rep.tau = tau;
    eng.run(words, rep.words);
    rep.cells_evaluated = eng.cells();
    rep.deepest_cell = eng.deepest();
    rep.full_horseshoe =
        std::all_of(rep.words.begin(), rep.words.end(), [](const WordReport& w) {
            return w.status == WordStatus::certified;
        });
    return rep;
}

ReverifyResult reverify_certificate(const BallPair& balls, const ItineraryWord& word,
                                    const CellCertificate& cert, const FlowOracle& oracle,
                                    int substep_factor) {
    validate_balls(balls);
    validate_word(word);
    if (substep_factor < 1)
        throw validation_error("re-verification substep factor must be >= 1");
    if (oracle.trajectory == nullptr)
        throw validation_error("flow oracle has no trajectory");
    if (cert.margins.size() != word.indices.size())
        throw validation_error("certificate does not match the word length");

    const std::int64_t steps = segments_per_tau(*oracle.trajectory, word.tau);
    AdvectOptions opt = oracle.options;
    opt.mode = EvalMode::exact;
    opt.substeps = oracle.options.substeps * substep_factor;

    OrbitProbe probe{cert.point, Mat2::identity()};
    std::span<OrbitProbe> one(&probe, 1);
    ReverifyResult res;
    res.passed = true;
    std::int64_t seg = oracle.segment_origin;
    for (std::size_t i = 0; i < word.indices.size(); ++i) {
        const std::int64_t target =
            oracle.segment_origin + static_cast<std::int64_t>(word.indices[i]) * steps;
        if (target > oracle.trajectory->segments())
            throw validation_error("trajectory too short for re-verification");
        advect_batch(*oracle.trajectory, seg, target, one, opt, false);
        seg = target;
        const TorusBall& b = target_ball(balls, word.symbols[i]);
        const double margin = b.radius - torus_distance(probe.x, b.center);
        res.margins.push_back(margin);
        if (!(margin >= 0.5 * cert.margins[i])) res.passed = false;
    }
    return res;
}

DensityReport estimate_hitting_density(const BallPair& balls, const FlowOracle& oracle,
                                       const DensityOptions& opt) {
    validate_balls(balls);
    if (opt.horizon < 1) throw validation_error("density horizon must be >= 1");
    if (opt.cap < 1 || opt.cap > kMaxItinerary)
        throw validation_error("density window cap must lie in [1, " +
                               std::to_string(kMaxItinerary) + "]");
    if (oracle.trajectory == nullptr)
        throw validation_error("flow oracle has no trajectory");
    const std::int64_t steps = segments_per_tau(*oracle.trajectory, opt.tau);
    if (oracle.segment_origin < 0)
        throw validation_error("flow oracle segment origin must be non-negative");
    if (oracle.segment_origin + static_cast<std::int64_t>(opt.horizon - 1) * steps >
        oracle.trajectory->segments())
        throw validation_error("trajectory too short for the density horizon");

    DensityReport rep;
    rep.horizon = opt.horizon;
    rep.tau = opt.tau;
    rep.cap = opt.cap;
    for (int j = 0; j < opt.horizon; ++j) {
        const auto keep = std::min<std::size_t>(static_cast<std::size_t>(opt.cap) - 1,
                                                rep.certified.size());
        std::vector<int> window(rep.certified.end() - static_cast<std::ptrdiff_t>(keep),
                                rep.certified.end());
        window.push_back(j);
        const int base = window.front();
        std::vector<int> rel(window.size());
        for (std::size_t i = 0; i < window.size(); ++i) rel[i] = window[i] - base;

        FlowOracle shifted = oracle;
        shifted.segment_origin = oracle.segment_origin + static_cast<std::int64_t>(base) * steps;
        HorseshoeReport wrep =
            certify_full_horseshoe(balls, rel, opt.tau, shifted, opt.budget);

        DensityIndexRecord r;
        r.index = j;
        r.words_total = static_cast<int>(wrep.words.size());
        r.cells = wrep.cells_evaluated;
        bool any_excluded = false, any_exhausted = false;
        for (const auto& w : wrep.words) {
            if (w.status == WordStatus::certified)
                ++r.words_certified;
            else if (w.status == WordStatus::excluded)
                any_excluded = true;
            else
                any_exhausted = true;
        }
        if (!any_excluded && !any_exhausted) {
            r.outcome = 'k';
            rep.certified.push_back(j);
        } else if (any_excluded) {
            r.outcome = 'f';
        } else {
            r.outcome = 'u';
            rep.undetermined.push_back(j);
        }
        rep.cells_total += wrep.cells_evaluated;
        rep.records.push_back(r);
        rep.last_window = std::move(wrep);
    }
    rep.density = static_cast<double>(rep.certified.size()) / opt.horizon;
    return rep;
}

double symbolic_entropy_lower_bound(const DensityReport& report) {
    if (!(report.tau > 0.0))
        throw validation_error("density report carries no positive time quantum");
    return report.density * std::numbers::ln2 / report.tau;
}

} // namespace torusflow
