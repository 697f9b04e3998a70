#pragma once

// Velocity trajectories as the tracer side sees them: a sequence of spectral
// states at uniform spacing dt.  Between consecutive states the velocity is
// interpolated linearly in time (the contract shared by the tracer, the
// Lyapunov co-integration, and the certifier's re-integration checks).

#include <cstdint>
#include <vector>

#include "torusflow/integrator.hpp"

namespace torusflow {

class TrajectoryView {
public:
    virtual ~TrajectoryView() = default;
    virtual double dt() const = 0;
    virtual std::int64_t segments() const = 0;  // stored states = segments + 1
    virtual const SpectralVelocity& field(std::int64_t state_index) const = 0;
    double duration() const { return segments() * dt(); }
    int cutoff() const { return field(0).cutoff(); }
};

class StoredTrajectory final : public TrajectoryView {
public:
    explicit StoredTrajectory(double dt) : dt_(dt) {
        if (!(dt > 0.0)) throw validation_error("StoredTrajectory: dt must be positive");
    }
    void append(SpectralVelocity f) { states_.push_back(std::move(f)); }
    void reserve(std::int64_t states) { states_.reserve(states); }

    double dt() const override { return dt_; }
    std::int64_t segments() const override {
        return static_cast<std::int64_t>(states_.size()) - 1;
    }
    const SpectralVelocity& field(std::int64_t i) const override { return states_.at(i); }

private:
    double dt_;
    std::vector<SpectralVelocity> states_;
};

// A constant-in-time field viewed as a trajectory of any length.
class FrozenTrajectory final : public TrajectoryView {
public:
    FrozenTrajectory(SpectralVelocity f, double dt, std::int64_t segments)
        : dt_(dt), segments_(segments), f_(std::move(f)) {
        if (!(dt > 0.0) || segments < 1)
            throw validation_error("FrozenTrajectory: need dt > 0 and >= 1 segment");
    }
    double dt() const override { return dt_; }
    std::int64_t segments() const override { return segments_; }
    const SpectralVelocity& field(std::int64_t) const override { return f_; }

private:
    double dt_;
    std::int64_t segments_;
    SpectralVelocity f_;
};

// Integrate and keep every state.  Refuses horizons whose storage would
// exceed max_bytes (the density scans at desk scale stay in the hundreds of
// megabytes; anything larger is a configuration mistake on this machine).
StoredTrajectory record_trajectory(const SimParams& params, const ForcingSpec& forcing,
                                   FlowState initial, const NoiseStream& noise,
                                   double duration,
                                   std::size_t max_bytes = std::size_t(3) << 30);

// Text container: a `torusflow-trajectory v1` header carrying dt and the
// state count, followed by one spectral block per state (same block format
// as save_field).
void save_trajectory(std::ostream& os, const TrajectoryView& tr);
StoredTrajectory load_trajectory(std::istream& is);
void save_trajectory_file(const std::string& path, const TrajectoryView& tr);
StoredTrajectory load_trajectory_file(const std::string& path);

} // namespace torusflow
