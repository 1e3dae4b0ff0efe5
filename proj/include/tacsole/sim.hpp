#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "tacsole/cop.hpp"
#include "tacsole/csv.hpp"
#include "tacsole/draw.hpp"
#include "tacsole/errors.hpp"
#include "tacsole/rng.hpp"
#include "tacsole/synth.hpp"

// Closed-loop simulation of the tilting-platform balance experiment:
// platform ramp -> plant (foot/CoP response) -> CoP measurement -> PID
// ankle command -> rate-limited servo -> plant. The plant is a first-order
// surrogate for the physical robot; its parameters are config values, not
// claims about the hardware.

namespace tacsole {

// ---------------------------------------------------------------------------
// PID controller (ankle correction from the normalized CoP error).

struct ControllerState {
    double kp = 0.35;
    double ki = 0.004;
    double kd = 0.01;
    double error = 0.0;      // last error consumed
    double prev_error = 0.0; // for the backward-difference derivative
    double integral = 0.0;   // error * s, anti-windup clamped
    double derivative = 0.0; // error / s, raw backward difference
    double theta_off = 0.0;  // last output, degrees
    double deadband = 0.02;        // |error| at or below this holds the output
    double output_clamp_deg = 30.0; // ankle range
    double windup_limit = 50.0;     // |integral| bound, error * s
    double error_to_deg = 30.0;     // scale from normalized error to degrees
};

// One controller tick. Output (and all accumulators) hold unchanged while
// |e| is inside the deadband. theta = scale * (kp*e + ki*ei + kd*ed),
// clamped to the ankle range.
inline ControllerState pid_step(ControllerState state, double e, double dt,
                                double* theta_out = nullptr)
{
    if (!std::isfinite(e)) throw controller_error("pid_step: non-finite error");
    if (dt <= 0.0) throw controller_error("pid_step: dt must be positive");
    double mag = e < 0.0 ? -e : e;
    if (mag <= state.deadband) {
        if (theta_out) *theta_out = state.theta_off;
        return state;
    }
    state.integral = std::clamp(state.integral + e * dt, -state.windup_limit, state.windup_limit);
    state.derivative = (e - state.prev_error) / dt;
    double theta = state.error_to_deg *
                   (state.kp * e + state.ki * state.integral + state.kd * state.derivative);
    theta = std::clamp(theta, -state.output_clamp_deg, state.output_clamp_deg);
    state.prev_error = e;
    state.error = e;
    state.theta_off = theta;
    if (theta_out) *theta_out = theta;
    return state;
}

// ---------------------------------------------------------------------------
// Plant: first-order lag of the normalized CoP toward kappa*(phi - theta)
// plus a constant forward bias (the robot's forward weight distribution).

struct PlantState {
    double platform_deg = 0.0; // phi
    double ankle_deg = 0.0;    // theta actually applied
    double cop_norm = 0.0;     // offset fraction in [-1, 1]
    double tau_s = 0.1;
    double kappa_per_deg = 0.04;
    double forward_bias = 0.0;
    double sensor_noise_sigma = 0.0;
};

inline PlantState plant_step(PlantState state, double phi_deg, double theta_deg, double dt)
{
    if (dt <= 0.0) throw numeric_error("plant_step: dt must be positive");
    double target = state.kappa_per_deg * (phi_deg - theta_deg) + state.forward_bias;
    state.cop_norm += dt / state.tau_s * (target - state.cop_norm);
    state.cop_norm = std::clamp(state.cop_norm, -1.0, 1.0);
    state.platform_deg = phi_deg;
    state.ankle_deg = theta_deg;
    return state;
}

// ---------------------------------------------------------------------------
// Scenarios and trials.

enum class TiltDirection { Declined = 0, Inclined = 1 }; // forward(+) / backward(-)

inline const char* tilt_direction_name(TiltDirection d)
{
    return d == TiltDirection::Declined ? "declined" : "inclined";
}

struct PlatformScenario {
    double target_angle_deg = 5.0; // magnitude; sign comes from direction
    double angular_speed_rad_s = 0.1;
    TiltDirection direction = TiltDirection::Declined;
    double duration_s = 0.0; // 0 = auto (ramp + grace + 3.5 s)
    std::uint64_t seed = 1;

    double signed_target_deg() const
    {
        return direction == TiltDirection::Declined ? target_angle_deg : -target_angle_deg;
    }
    double speed_deg_s() const { return angular_speed_rad_s * 180.0 / std::numbers::pi; }
    double ramp_time_s() const { return target_angle_deg / speed_deg_s(); }
};

// Ramp at the scenario's angular speed from level to the target, then hold.
inline double platform_angle(const PlatformScenario& scenario, double t)
{
    if (t < 0.0) throw numeric_error("platform_angle: negative time");
    double mag = std::min(scenario.target_angle_deg, scenario.speed_deg_s() * t);
    return scenario.direction == TiltDirection::Declined ? mag : -mag;
}

enum class LoopMode { Direct = 0, Full = 1 };

struct TrialConfig {
    double control_rate_hz = 28.0;
    int sensing_delay_ticks = 1;
    LoopMode mode = LoopMode::Direct;
    double safe_fraction = 0.25;
    double grace_s = 1.0; // settling grace after the ramp completes

    // Plant surrogate defaults, tuned once so the published success
    // pattern emerges, then frozen here.
    double kappa_per_deg = 0.08;
    double tau_s = 0.1;
    double forward_bias = 0.05;
    double sensor_noise_sigma = 0.0;

    // Controller (published gains; the scale bridges normalized error to
    // degrees and is recorded in every report).
    double kp = 0.35, ki = 0.004, kd = 0.01;
    double error_to_deg = 160.0;
    double deadband = 0.02;
    double windup_limit = 50.0;
    double output_clamp_deg = 30.0;

    // Servo surrogate: the ankle tracks the command at a direction-
    // dependent rate. Toe-up corrections (positive, fighting a forward
    // lean) are slower, which carries the forward-weight asymmetry.
    double slew_up_deg_s = 3.2;
    double slew_down_deg_s = 8.0;

    // Full mode only: press rendering scale (fraction of half-height per
    // unit cop_norm).
    double press_span = 0.85;
};

struct TrialSample {
    double t = 0.0;
    double phi_deg = 0.0;
    double theta_cmd_deg = 0.0;
    double theta_deg = 0.0;
    double cop_norm = 0.0;
    double offset_measured = 0.0;
    CopStatus status = CopStatus::Safe;
};

struct TrialResult {
    PlatformScenario scenario;
    bool feedback = false;
    LoopMode mode = LoopMode::Direct;
    bool success = false;
    double max_offset_after_grace = 0.0;
    double settle_time_s = 0.0; // last instant the measured offset was unsafe
    double max_abs_theta_deg = 0.0;
    std::vector<TrialSample> trace;
};

namespace detail {

// Measurement through the full perception path: render a textured press
// at the plant's CoP and run the threshold + weighted-mean pipeline.
inline double measure_full(double cop_norm, std::uint64_t seed, const TrialConfig& config)
{
    SensorGeometry geom;
    PressSceneConfig press;
    double center = (press.geom.height_px - 1) / 2.0;
    double row = center + cop_norm * (press.geom.height_px / 2.0) * config.press_span;
    row = std::clamp(row, 2.0, static_cast<double>(press.geom.height_px - 3));
    PressRender render = render_textured_press(row, (press.geom.width_px - 1) / 2.0, seed, press);
    ImageGray8 gray = to_gray(render.frame.pixels);
    ContactMask mask = threshold_pressure(gray);
    CoPEstimate est = estimate_cop(mask, geom, config.safe_fraction);
    if (est.status == CopStatus::NoContact) return 0.0;
    return est.offset_fraction / config.press_span;
}

} // namespace detail

inline TrialResult run_trial(const PlatformScenario& scenario, bool feedback,
                             const TrialConfig& config = TrialConfig{})
{
    PlatformScenario sc = scenario;
    double ramp_end = sc.ramp_time_s();
    double min_duration = ramp_end + config.grace_s + 2.0;
    if (sc.duration_s <= 0.0) sc.duration_s = ramp_end + config.grace_s + 3.5;
    sc.duration_s = std::max(sc.duration_s, min_duration);

    double dt = 1.0 / config.control_rate_hz;
    int n_ticks = static_cast<int>(std::ceil(sc.duration_s / dt));

    PlantState plant;
    plant.tau_s = config.tau_s;
    plant.kappa_per_deg = config.kappa_per_deg;
    plant.forward_bias = config.forward_bias;
    plant.sensor_noise_sigma = config.sensor_noise_sigma;
    plant.cop_norm = config.forward_bias; // settled stance before the tilt

    ControllerState pid;
    pid.kp = config.kp;
    pid.ki = config.ki;
    pid.kd = config.kd;
    pid.deadband = config.deadband;
    pid.windup_limit = config.windup_limit;
    pid.output_clamp_deg = config.output_clamp_deg;
    pid.error_to_deg = config.error_to_deg;

    Rng rng = make_rng(sc.seed);
    std::vector<double> delay_line(static_cast<std::size_t>(config.sensing_delay_ticks) + 1,
                                   plant.cop_norm);

    TrialResult result;
    result.scenario = sc;
    result.feedback = feedback;
    result.mode = config.mode;
    result.trace.reserve(static_cast<std::size_t>(n_ticks));

    double theta_cmd = 0.0;
    double theta_actual = 0.0;
    double judged_from = ramp_end + config.grace_s;
    bool all_safe = true;

    for (int k = 0; k < n_ticks; ++k) {
        double t = (k + 1) * dt;
        double phi = platform_angle(sc, t);
        plant = plant_step(plant, phi, theta_actual, dt);

        double measured;
        if (config.mode == LoopMode::Direct) {
            measured = plant.cop_norm;
            if (plant.sensor_noise_sigma > 0.0)
                measured += gaussian(rng, 0.0, plant.sensor_noise_sigma);
        } else {
            measured = detail::measure_full(
                plant.cop_norm, sc.seed ^ (0x9e3779b97f4a7c15ull * (k + 1)), config);
        }
        measured = std::clamp(measured, -1.0, 1.0);

        // One-frame sensing delay: the controller sees the previous tick.
        delay_line.push_back(measured);
        double sensed = delay_line.front();
        delay_line.erase(delay_line.begin());

        if (feedback)
            pid = pid_step(pid, sensed, dt, &theta_cmd);
        else
            theta_cmd = 0.0;

        // Servo tracks the command at a direction-dependent slew rate.
        double want = theta_cmd - theta_actual;
        double max_step = (want >= 0.0 ? config.slew_up_deg_s : config.slew_down_deg_s) * dt;
        theta_actual += std::clamp(want, -max_step, max_step);

        TrialSample s;
        s.t = t;
        s.phi_deg = phi;
        s.theta_cmd_deg = theta_cmd;
        s.theta_deg = theta_actual;
        s.cop_norm = plant.cop_norm;
        s.offset_measured = measured;
        s.status = classify_safety(measured, 1, config.safe_fraction);
        result.trace.push_back(s);

        result.max_abs_theta_deg = std::max(result.max_abs_theta_deg, std::abs(theta_cmd));
        double mag = std::abs(measured);
        if (mag > config.safe_fraction) result.settle_time_s = t;
        if (t >= judged_from) {
            result.max_offset_after_grace = std::max(result.max_offset_after_grace, mag);
            if (mag > config.safe_fraction) all_safe = false;
        }
    }
    result.success = all_safe;
    return result;
}

// ---------------------------------------------------------------------------
// Experiment matrix: angles {5, 10, 15} x speeds {0.1, 0.3} x directions
// x feedback on/off, deterministic per seed.

struct MatrixResult {
    std::vector<TrialResult> trials;

    int successes(bool feedback_on) const
    {
        int n = 0;
        for (const TrialResult& t : trials)
            if (t.feedback == feedback_on && t.success) ++n;
        return n;
    }
    const TrialResult* find(TiltDirection dir, double angle, double speed, bool feedback) const
    {
        for (const TrialResult& t : trials)
            if (t.scenario.direction == dir && t.scenario.target_angle_deg == angle &&
                t.scenario.angular_speed_rad_s == speed && t.feedback == feedback)
                return &t;
        return nullptr;
    }
};

inline MatrixResult run_matrix(const TrialConfig& config = TrialConfig{}, std::uint64_t seed = 1)
{
    MatrixResult out;
    const double angles[] = {5.0, 10.0, 15.0};
    const double speeds[] = {0.1, 0.3};
    const TiltDirection dirs[] = {TiltDirection::Declined, TiltDirection::Inclined};
    std::uint64_t k = 0;
    for (TiltDirection dir : dirs)
        for (double angle : angles)
            for (double speed : speeds)
                for (bool feedback : {true, false}) {
                    PlatformScenario sc;
                    sc.target_angle_deg = angle;
                    sc.angular_speed_rad_s = speed;
                    sc.direction = dir;
                    sc.seed = seed + 1000 * (k++);
                    out.trials.push_back(run_trial(sc, feedback, config));
                }
    return out;
}

inline void write_trial_trace_csv(const std::string& path, const TrialResult& trial)
{
    CsvWriter csv(path);
    csv.header({"t", "phi_deg", "theta_cmd_deg", "theta_deg", "cop_norm", "offset_fraction",
                "status"});
    for (const TrialSample& s : trial.trace) {
        csv.field(s.t)
            .field(s.phi_deg)
            .field(s.theta_cmd_deg)
            .field(s.theta_deg)
            .field(s.cop_norm)
            .field(s.offset_measured)
            .field(cop_status_name(s.status));
        csv.end_row();
    }
}

inline void write_matrix_csv(const std::string& path, const MatrixResult& matrix)
{
    CsvWriter csv(path);
    csv.header({"direction", "angle_deg", "speed_rad_s", "feedback", "success",
                "max_offset_after_grace", "settle_time_s"});
    for (const TrialResult& t : matrix.trials) {
        csv.field(tilt_direction_name(t.scenario.direction))
            .field(t.scenario.target_angle_deg)
            .field(t.scenario.angular_speed_rad_s)
            .field(t.feedback ? "on" : "off")
            .field(t.success ? 1 : 0)
            .field(t.max_offset_after_grace)
            .field(t.settle_time_s);
        csv.end_row();
    }
}

// Success/failure grid: rows are (angle, speed) pairs, columns are
// direction x feedback; green = success, red = failure.
inline ImageRGB8 render_matrix_grid(const MatrixResult& matrix, int cell_px = 32)
{
    const double angles[] = {5.0, 10.0, 15.0};
    const double speeds[] = {0.1, 0.3};
    ImageRGB8 img(4 * cell_px, 6 * cell_px, 30);
    int row = 0;
    for (double angle : angles) {
        for (double speed : speeds) {
            int col = 0;
            for (TiltDirection dir : {TiltDirection::Declined, TiltDirection::Inclined}) {
                for (bool feedback : {true, false}) {
                    const TrialResult* t = matrix.find(dir, angle, speed, feedback);
                    Color c = (t && t->success) ? kGreen : kRed;
                    for (int pr = 2; pr < cell_px - 2; ++pr)
                        for (int pc = 2; pc < cell_px - 2; ++pc)
                            put_px(img, row * cell_px + pr, col * cell_px + pc, c);
                    ++col;
                }
            }
            ++row;
        }
    }
    return img;
}

} // namespace tacsole
