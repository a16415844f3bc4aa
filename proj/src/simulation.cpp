#include "adepth/simulation.hpp"

#include <algorithm>
#include <iterator>
#include <ostream>
#include <random>
#include <sstream>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

namespace adepth {

std::string_view to_string(RunStatus s) {
  return s == RunStatus::kCompleted ? "completed" : "singularity";
}

ReferenceSample reference_at(const ReferenceSpec& spec, Strategy strategy, double t) {
  if (strategy == Strategy::kBaselineOrigin) return {Vec2::Zero(), Vec2::Zero()};
  switch (spec.kind) {
    case ReferenceKind::kConstant: return {spec.s_des, Vec2::Zero()};
    case ReferenceKind::kCircular: return {reference_circular(t), reference_circular_rate(t)};
    case ReferenceKind::kOrigin: return {Vec2::Zero(), Vec2::Zero()};
  }
  return {Vec2::Zero(), Vec2::Zero()};
}

Vec2 tracking_command(const Vec2& s, const ReferenceSample& ref, double k_p) {
  return ref.s_des_dot + proportional_reference(s, ref.s_des, k_p);
}

Vec2 world_to_measurement(const Vec3& point_camera) { return project(point_camera).s; }

SimLog run_scenario(const ScenarioConfig& cfg) { return run_scenario(cfg, cfg.strategy); }

SimLog run_scenario(const ScenarioConfig& cfg, Strategy strategy) {
  cfg.validate();
  SimLog log;
  log.strategy = strategy;

  const Vec3 p_world = back_project(cfg.s0, cfg.chi0);
  CoupledState x;
  x.point = p_world;
  x.est.s_hat = cfg.s0;
  x.est.chi_hat = cfg.chi_hat0;
  CameraPose pose;

  std::mt19937_64 rng(cfg.noise_seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto draw_noise = [&]() -> MeasurementOffset {
    if (cfg.noise_std == 0.0) return {};
    const double nx = gauss(rng);
    const double ny = gauss(rng);
    return {cfg.noise_std * Vec2(nx, ny)};
  };

  const std::int64_t n = cfg.step_count();
  log.rows.reserve(static_cast<std::size_t>(n + 1));
  log.branches.reserve(static_cast<std::size_t>(n + 1));

  bool guard_fired = false;
  auto command = [&](const Vec3& point, const EstimatorState& est, const MeasurementOffset& noise,
                     double t) {
    const Vec2 meas = world_to_measurement(point) + noise.value;
    const ReferenceSample ref = reference_at(cfg.reference, strategy, t);
    try {
      return control(strategy, meas, est.chi_hat, tracking_command(meas, ref, cfg.k_p), cfg.limits,
                     cfg.guards);
    } catch (const SingularityError&) {
      if (cfg.on_singularity == SingularityPolicy::kTerminate) throw;
      guard_fired = true;
      return hold_output(meas, cfg.limits);
    }
  };

  for (std::int64_t k = 0;; ++k) {
    const double t = static_cast<double>(k) * cfg.dt;
    const Projection truth = project(x.point);
    const MeasurementOffset noise = draw_noise();

    ControlOutput out;
    guard_fired = false;
    try {
      out = command(x.point, x.est, noise, t);
      if (guard_fired) {
        ++log.singularity_holds;
        spdlog::debug("[{}] t = {:.4f}: inside the origin guard, holding", to_string(strategy), t);
      }
    } catch (const SingularityError& e) {
      log.status = RunStatus::kSingularity;
      log.status_message = fmt::format("t = {:.6g}: {}", t, e.what());
      spdlog::warn("[{}] stopping: {}", to_string(strategy), log.status_message);
      break;
    }

    const StabilityReport rep = monitor(truth.s, truth.chi, x.est, out.twist, cfg.gains, cfg.constraint_tol);
    if (!rep.all_ok()) {
      ++log.constraint_violations;
      spdlog::debug("[{}] t = {:.4f}: constraint check failed (Jl_w = {:.3e}, Jq_v = {:.3e}, sigma^2 = {:.3e})",
                    to_string(strategy), t, rep.c1_Jl_w, rep.c2_Jq_v, rep.sigma_sq);
    }

    SimLogRow row;
    const ReferenceSample ref = reference_at(cfg.reference, strategy, t);
    row.t = t;
    row.s = truth.s;
    row.s_des = ref.s_des;
    row.s_hat = x.est.s_hat;
    row.chi = truth.chi;
    row.chi_hat = x.est.chi_hat;
    row.chi_tilde = truth.chi - x.est.chi_hat;
    row.e_norm = (truth.s - ref.s_des).norm();
    row.v = out.twist.v;
    row.w = out.twist.w;
    row.lambda_pi = out.lambda_pi;
    row.V = rep.V;
    row.V_dot = rep.V_dot;
    row.sigma_sq = rep.sigma_sq;
    row.Jl_w = rep.c1_Jl_w;
    row.Jq_v = rep.c2_Jq_v;
    row.cam_position = pose.position;
    row.cam_orientation = pose.orientation;
    log.rows.push_back(row);
    log.branches.push_back(out.branch);

    if (k >= n) break;

    // RK4 stage weights, used to average the applied twist for the pose update.
    static constexpr double kStageWeight[4] = {1.0 / 6.0, 2.0 / 6.0, 2.0 / 6.0, 1.0 / 6.0};
    CameraTwist applied;
    int stage = 0;
    TwistPolicy policy;
    if (cfg.control_update == ControlUpdate::kZeroOrderHold) {
      applied = out.twist;
      policy = [&out](const CoupledState&, double) { return out.twist; };
    } else {
      policy = [&](const CoupledState& st, double tau) {
        const CameraTwist u = stage == 0 ? out.twist : command(st.point, st.est, noise, t + tau).twist;
        applied.v += kStageWeight[stage] * u.v;
        applied.w += kStageWeight[stage] * u.w;
        ++stage;
        return u;
      };
    }

    StepResult<CoupledState> step;
    try {
      step = integrate_step(x, policy, cfg.gains, cfg.dt, noise);
    } catch (const SingularityError& e) {
      log.status = RunStatus::kSingularity;
      log.status_message = fmt::format("t = {:.6g}: {}", t, e.what());
      spdlog::warn("[{}] stopping: {}", to_string(strategy), log.status_message);
      break;
    }
    if (step.chi_hat_clamped) {
      ++log.chi_hat_clamps;
      spdlog::info("[{}] t = {:.4f}: chi_hat clamped at 0", to_string(strategy), t + cfg.dt);
    }
    pose = camera_pose_update(pose, applied, cfg.dt);
    x = step.next;
  }
  return log;
}

void write_csv(const SimLog& log, std::ostream& out) {
  fmt::memory_buffer buf;
  buf.append(kCsvHeader);
  buf.push_back('\n');
  auto put = [&](double d) { fmt::format_to(std::back_inserter(buf), "{:.12g},", d); };
  for (const SimLogRow& r : log.rows) {
    put(r.t);
    put(r.s.x());
    put(r.s.y());
    put(r.s_des.x());
    put(r.s_des.y());
    put(r.s_hat.x());
    put(r.s_hat.y());
    put(r.chi);
    put(r.chi_hat);
    put(r.chi_tilde);
    put(r.e_norm);
    for (int i = 0; i < 3; ++i) put(r.v(i));
    for (int i = 0; i < 3; ++i) put(r.w(i));
    put(r.lambda_pi);
    put(r.V);
    put(r.V_dot);
    put(r.sigma_sq);
    put(r.Jl_w);
    put(r.Jq_v);
    for (int i = 0; i < 3; ++i) put(r.cam_position(i));
    put(r.cam_orientation.w());
    put(r.cam_orientation.x());
    put(r.cam_orientation.y());
    put(r.cam_orientation.z());
    buf[buf.size() - 1] = '\n';
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

std::string to_csv(const SimLog& log) {
  std::ostringstream out;
  write_csv(log, out);
  return out.str();
}

CrossCheck replay_projection_crosscheck(const ScenarioConfig& cfg, const SimLog& log) {
  CoupledState world;
  world.point = back_project(cfg.s0, cfg.chi0);
  world.est.s_hat = cfg.s0;
  world.est.chi_hat = cfg.chi_hat0;
  ImageCoupledState image;
  image.s = cfg.s0;
  image.chi = cfg.chi0;
  image.est = world.est;

  CrossCheck cc;
  for (std::size_t k = 0; k + 1 < log.rows.size(); ++k) {
    const CameraTwist u{log.rows[k].v, log.rows[k].w};
    world = integrate_step(world, u, cfg.gains, cfg.dt).next;
    image = integrate_step(image, u, cfg.gains, cfg.dt).next;
    const Projection p = project(world.point);
    cc.max_s_error = std::max(cc.max_s_error, (p.s - image.s).norm());
    cc.max_chi_error = std::max(cc.max_chi_error, std::abs(p.chi - image.chi));
  }
  return cc;
}

}  // namespace adepth
