#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "adepth/config.hpp"
#include "adepth/controllers.hpp"
#include "adepth/observer.hpp"
#include "adepth/pose.hpp"
#include "adepth/stability.hpp"

namespace adepth {

struct SimLogRow {
  double t = 0.0;
  Vec2 s = Vec2::Zero();
  Vec2 s_des = Vec2::Zero();
  Vec2 s_hat = Vec2::Zero();
  double chi = 0.0;
  double chi_hat = 0.0;
  double chi_tilde = 0.0;
  double e_norm = 0.0;
  Vec3 v = Vec3::Zero();
  Vec3 w = Vec3::Zero();
  double lambda_pi = 0.0;
  double V = 0.0;
  double V_dot = 0.0;
  double sigma_sq = 0.0;
  double Jl_w = 0.0;
  double Jq_v = 0.0;
  Vec3 cam_position = Vec3::Zero();
  Eigen::Quaterniond cam_orientation = Eigen::Quaterniond::Identity();
};

enum class RunStatus { kCompleted, kSingularity };

std::string_view to_string(RunStatus s);

struct SimLog {
  Strategy strategy = Strategy::kCaseA;
  std::vector<SimLogRow> rows;
  RunStatus status = RunStatus::kCompleted;
  std::string status_message;
  /// Steps at which one of the convergence constraints failed its check.
  std::int64_t constraint_violations = 0;
  std::int64_t chi_hat_clamps = 0;
  /// Logged steps where the singularity guard fired and the hold twist was
  /// applied instead (only with SingularityPolicy::kHold).
  std::int64_t singularity_holds = 0;
  /// Branch taken by the controller at each logged row.
  std::vector<Branch> branches;
};

/// Reference value and its time derivative at time t.
struct ReferenceSample {
  Vec2 s_des;
  Vec2 s_des_dot;
};

/// Reference used by `strategy` under `spec`. The origin baseline always
/// tracks s_des = 0.
ReferenceSample reference_at(const ReferenceSpec& spec, Strategy strategy, double t);

/// Tracking command: feedforward of the reference rate plus proportional
/// feedback, pi = s_des_dot - k_p (s - s_des). For a constant reference this
/// is the plain proportional law.
Vec2 tracking_command(const Vec2& s, const ReferenceSample& ref, double k_p);

/// Noiseless projection of the point in the camera frame.
Vec2 world_to_measurement(const Vec3& point_camera);

/// Closed-loop run: measure, command, control, monitor, log, integrate.
/// Identical configs produce identical logs. A controller singularity ends the
/// run early with `status == kSingularity`; non-finite states throw
/// IntegrationError and a point behind the camera throws DomainError.
SimLog run_scenario(const ScenarioConfig& cfg);

/// Same as `run_scenario` but with the strategy overridden.
SimLog run_scenario(const ScenarioConfig& cfg, Strategy strategy);

inline constexpr std::string_view kCsvHeader =
    "t,s_x,s_y,s_des_x,s_des_y,s_hat_x,s_hat_y,chi,chi_hat,chi_tilde,e_norm,"
    "v_x,v_y,v_z,w_x,w_y,w_z,lambda_pi,V,V_dot,sigma_sq,Jl_w,Jq_v,"
    "cam_px,cam_py,cam_pz,cam_qw,cam_qx,cam_qy,cam_qz";

/// CSV with the header above; 12 significant digits, LF line endings.
void write_csv(const SimLog& log, std::ostream& out);
std::string to_csv(const SimLog& log);

/// Replays the logged twists open-loop (held over each step) through two
/// independent propagations of the true state: the camera-frame point and
/// the image-space dynamics. Returns the largest deviation between the
/// projected point and the image-space state over the run.
struct CrossCheck {
  double max_s_error = 0.0;
  double max_chi_error = 0.0;
};
CrossCheck replay_projection_crosscheck(const ScenarioConfig& cfg, const SimLog& log);

}  // namespace adepth
