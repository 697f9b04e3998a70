#pragma once

// Certified itinerary search: given two disjoint closed balls on the torus and
// a grid of check times tau*j, find initial points whose orbits visit a
// prescribed ball at every check time.  The search subdivides initial
// conditions with a quadtree; each cell's orbit is integrated once at the cell
// center, carrying the tangent Jacobian, and the cell's image at check time
// tau*j is bounded inside ball(image of center, Lip_j * halfdiag) with
// Lip_j = safety * opnorm(D(0 -> tau j)).  A cell is accepted for a word when
// every padded image ball sits inside its target, rejected when some padded
// ball is disjoint from its target, and split otherwise.
//
// The certification is sampled-Lipschitz honest, not interval-rigorous: Lip_j
// is sampled at the cell center and inflated by a fixed safety factor.  The
// compensating control is reverify_certificate, which re-integrates certified
// points at finer tracer resolution and demands that at least half of every
// reported margin survives.
//
// All words over one index set share a single tree (a cell's orbit is
// evaluated once, classification is per word).  Cell-orbit evaluations within
// a refinement generation are independent; they may be split across workers,
// and the classification merge is order-independent, so reports are a pure
// function of (trajectory, balls, indices, budget).

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "torusflow/tracer.hpp"

namespace torusflow {

inline constexpr double kLipschitzSafety = 1.5;
inline constexpr int kMaxItinerary = 12;  // word sets are enumerated exhaustively

struct TorusBall {
    TorusPoint center;
    double radius = 0.0;  // geodesic radius, must lie in (0, pi)
};
void validate_ball(const TorusBall& b);

struct BallPair {
    TorusBall first, second;  // centers further apart than the radii sum
};
void validate_balls(const BallPair& balls);

// Symbol s(j) in {1, 2} prescribes which ball the orbit must visit at time
// tau*j, for j running over a strictly increasing index set.
struct ItineraryWord {
    std::vector<int> indices;
    std::vector<std::uint8_t> symbols;  // parallel to indices, values 1 or 2
    double tau = 1.0;
};
void validate_word(const ItineraryWord& w);

// A fixed velocity realization plus evaluation options; itinerary time zero
// sits at segment_origin.  tau must be a multiple of the trajectory step.
struct FlowOracle {
    const TrajectoryView* trajectory = nullptr;
    AdvectOptions options{};
    std::int64_t segment_origin = 0;
};

struct SearchBudget {
    std::int64_t max_cells = 200000;  // orbit evaluations per call
    int max_depth = 12;               // depth-d cells have half-width pi/2^d
    int workers = 1;                  // threads for batch orbit evaluation
};

struct CellCertificate {
    TorusPoint point;        // certified cell center x_s
    double half_width = 0.0; // half side length of the cell
    int depth = 0;
    std::vector<double> margins;     // per index: radius - dist - Lip*halfdiag (> 0)
    std::vector<double> lipschitz;   // per index: the Lip_j bound used
    std::vector<TorusPoint> images;  // center orbit at the check times
};

enum class WordStatus { certified, excluded, exhausted };

struct WordReport {
    std::vector<std::uint8_t> symbols;
    WordStatus status = WordStatus::exhausted;
    CellCertificate certificate;  // meaningful iff status == certified
    int depth_reached = 0;        // deepest cell classified for this word
    std::int64_t frontier_size = 0;  // undecided cells abandoned (exhausted only)
    std::string failure;             // "", "budget", or "depth"
};

// Search for one word.  Returns a certificate, or an exclusion (every cell of
// the torus provably misses the itinerary), or an exhausted report with the
// abandoned refinement frontier.
WordReport realize_word(const BallPair& balls, const ItineraryWord& word,
                        const FlowOracle& oracle, const SearchBudget& budget = {});

struct HorseshoeReport {
    BallPair balls;
    std::vector<int> indices;
    double tau = 0.0;
    std::vector<WordReport> words;  // 2^|indices| entries, symbols lexicographic
    bool full_horseshoe = false;    // every word certified
    std::int64_t cells_evaluated = 0;
    int deepest_cell = 0;
};

// All 2^|indices| words over one index set, sharing one quadtree.
HorseshoeReport certify_full_horseshoe(const BallPair& balls,
                                       const std::vector<int>& indices, double tau,
                                       const FlowOracle& oracle,
                                       const SearchBudget& budget = {});

struct ReverifyResult {
    bool passed = false;
    std::vector<double> margins;  // radius - dist(finer orbit, target center)
};

// Soundness control: re-integrate x_s at substep_factor finer tracer steps
// using exact mode summation; every check time must keep at least half of the
// reported margin.
ReverifyResult reverify_certificate(const BallPair& balls, const ItineraryWord& word,
                                    const CellCertificate& cert, const FlowOracle& oracle,
                                    int substep_factor = 10);

// Greedy hitting-set construction: scan indices 0..horizon-1 in order and keep
// index j when every word over (last cap-1 kept indices) + {j} certifies.  The
// window is re-based at its first index: the quadtree subdivides positions at
// the window-start time, which determines initial points at time zero because
// the flow maps are diffeomorphisms.  Produces a lower-bound index set, not
// the maximal one.
struct DensityOptions {
    double tau = 1.0;
    int horizon = 40;
    int cap = 2;            // window length bound, in [1, kMaxItinerary]
    SearchBudget budget{};  // per window test
};

struct DensityIndexRecord {
    int index = 0;
    char outcome = 'u';  // 'k' kept, 'f' failed (some word excluded), 'u' undetermined
    int words_certified = 0;
    int words_total = 0;
    std::int64_t cells = 0;
};

struct DensityReport {
    int horizon = 0;
    double tau = 0.0;
    int cap = 0;
    std::vector<int> certified;     // the kept index set J
    std::vector<int> undetermined;  // budget/depth exhausted, not counted in J
    double density = 0.0;           // |J| / horizon
    std::vector<DensityIndexRecord> records;
    std::int64_t cells_total = 0;
    HorseshoeReport last_window;  // word table of the final tested window
};

DensityReport estimate_hitting_density(const BallPair& balls, const FlowOracle& oracle,
                                       const DensityOptions& opt);

// density * log 2 / tau: certified free bits per unit time.
double symbolic_entropy_lower_bound(const DensityReport& report);

} // namespace torusflow
