// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Every check compares against an oracle computed here, not against
// values the library reports about itself.

#include "tetherswarm/tetherswarm.hpp"

#include <Eigen/SVD>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>

using namespace tetherswarm;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

std::string scenario(const std::string& name) {
  return std::string(TETHERSWARM_SCENARIO_DIR) + "/" + name;
}

RunResult run_scenario(const std::string& name) {
  return run(load_config(scenario(name + ".json")), load_hand_trajectory(scenario(name + ".csv")));
}

constexpr double kEps = std::numeric_limits<double>::epsilon();

// 1. Moment rows of the mixer against the rotor equations evaluated by hand.
Outcome mixer_fidelity() {
  const RotorParams p;
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> w(p.omega_min, p.omega_max);
  const double kfl = p.k_f * p.arm_length;
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const RotorCommand c{{w(rng), w(rng), w(rng), w(rng)}};
    const auto sq = [&](int r) { return c.omega[r] * c.omega[r]; };
    for (YawConvention y : {YawConvention::Uniform, YawConvention::AlternatingSigns}) {
      const ControlInput u = mix_forward(c, p, y);
      const double u2 = kfl * (sq(1) - sq(3));
      const double u3 = kfl * (sq(2) - sq(0));
      // A few ulps of the larger operand: the subtraction is exact up to
      // rounding of each squared term.
      worst = std::max(worst, std::abs(u.u2 - u2) / (kfl * (sq(1) + sq(3)) * kEps));
      worst = std::max(worst, std::abs(u.u3 - u3) / (kfl * (sq(2) + sq(0)) * kEps));
    }
  }
  bool equal_zero = true;
  for (double s : {0.0, 1.0, 1234.5, p.omega_max}) {
    const ControlInput u = mix_forward(RotorCommand{{s, s, s, s}}, p);
    equal_zero = equal_zero && u.u2 == 0.0 && u.u3 == 0.0;
  }
  return {worst <= 4.0 && equal_zero,
          fmt("worst moment error %.2f ulp (limit 4), equal speeds give exact zero: ", worst) +
              (equal_zero ? "yes" : "no")};
}

// 2. Rank of the uniform-yaw matrix.
Outcome uniform_matrix_rank() {
  const RotorParams p;
  const Eigen::JacobiSVD<Eigen::Matrix4d> svd(mixer_matrix(p, YawConvention::Uniform));
  const auto s = svd.singularValues();
  const double ratio = s(3) / s(0);
  const Eigen::JacobiSVD<Eigen::Matrix4d> alt(mixer_matrix(p, YawConvention::AlternatingSigns));
  const double alt_ratio = alt.singularValues()(3) / alt.singularValues()(0);
  return {ratio < 1e-12 && alt_ratio > 1e-12,
          fmt("uniform-yaw sigma_min/sigma_max = %.3g (limit 1e-12); alternating-sign %.3g",
              ratio, alt_ratio)};
}

// 3. Allocation round-trip over feasible inputs.
Outcome allocation_round_trip() {
  const RotorParams p;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> w(p.omega_min, p.omega_max);
  double worst = 0.0;
  int saturated = 0;
  for (int i = 0; i < 1000; ++i) {
    const ControlInput u = mix_forward(RotorCommand{{w(rng), w(rng), w(rng), w(rng)}}, p);
    const Allocation a = mix_inverse(u, p);
    saturated += a.saturated;
    const ControlInput back = mix_forward(a.command, p);
    worst = std::max(worst, (back.as_vector() - u.as_vector()).norm() / u.as_vector().norm());
  }
  return {worst <= 1e-9 && saturated == 0,
          fmt("worst relative error %.3g (limit 1e-9), saturated %g of 1000", worst, saturated)};
}

// 4. Follow-mode hover.
Outcome hover() {
  SimConfig c;
  c.duration = 5.0;
  c.drones.assign(5, DroneConfig{});
  c.tethers.push_back(TetherParams{});
  c.mocap.position_noise_std = 0.0;
  c.mocap.attitude_noise_std = 0.0;
  c.mocap.latency = 0.0;
  HandTrajectory::Sample s;
  for (std::size_t f = 0; f < kFingerCount; ++f) s[f] = Vec3(0.2 * f, 0.0, 0.9);
  const HandTrajectory hand = HandTrajectory::stationary(s);
  for (std::size_t d = 0; d < 5; ++d) {
    RigidBodyState init;
    init.position = s[d] + c.activation.follow_offset + Vec3(0.03, -0.02, 0.05 * (d % 2 ? 1 : -1));
    c.drones[d].initial = init;
  }
  const RunResult r = run(c, hand);
  const QuadrotorModel m;
  const double omega_h = std::sqrt(m.mass * c.gravity / (4.0 * m.rotors.k_f));
  double pos = 0.0, speed = 0.0;
  for (std::size_t d = 0; d < 5; ++d) {
    const DroneTick& last = r.log.ticks.back().drones[d];
    pos = std::max(pos, (last.state.position - (s[d] + c.activation.follow_offset)).norm());
    for (double w : last.command.omega) speed = std::max(speed, std::abs(w - omega_h) / omega_h);
  }
  return {pos < 0.01 && speed < 0.01,
          fmt("position error %.3g m (limit 0.01), rotor deviation %.3g%% of omega_h=%.1f (limit 1%%)",
              pos, 100 * speed, omega_h)};
}

// Mean of a per-tick quantity over the final 20% of a contact's ticks.
template <class F>
double steady_mean(const SimLog& log, const ContactMetrics& c, F value) {
  const auto index = [&](double t) { return static_cast<std::size_t>(std::llround(t / log.meta.physics_dt)); };
  const std::size_t begin = index(c.start), end = index(c.end) + 1;
  const std::size_t len = end - begin;
  const auto tail = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(0.2 * len)));
  double sum = 0.0;
  for (std::size_t k = end - tail; k < end; ++k) sum += value(log.ticks[k]);
  return sum / static_cast<double>(tail);
}

// 5. Single finger press rendering 1 N.
Outcome force_rendering() {
  const SimConfig cfg = load_config(scenario("press.json"));
  const HandTrajectory hand = load_hand_trajectory(scenario("press.csv"));
  const RunResult r = run(cfg, hand);
  const std::size_t drone = index_of(Finger::Index);

  // Commanded force from the scripted hold depth: penalty stiffness x depth.
  Vec3 hold = hand.poses().front()[drone];
  for (const auto& pose : hand.poses())
    if (pose[drone].z() < hold.z()) hold = pose[drone];
  const double hold_z = hold.z();
  VirtualSurface key;
  for (const VirtualSurface& s : cfg.surfaces)
    if (s.extent.contains(hold.x(), hold.y())) key = s;
  const double command = key.stiffness * (key.height - hold_z);

  const ContactMetrics* contact = nullptr;
  for (const auto& c : r.metrics.contacts)
    if (c.drone == static_cast<int>(drone)) contact = &c;
  if (!contact || std::abs(command - 1.0) > 1e-9)
    return {false, fmt("no rendering contact found (scripted command %.3f N)", command)};

  double tilt = 0.0, horizontal = 0.0;
  std::vector<double> held;
  for (const TickRecord& t : r.log.ticks) {
    const DroneTick& d = t.drones[drone];
    if (!d.tension) continue;
    tilt = std::max(tilt, tilt_angle(d.state.orientation));
    // Hold phase: the finger is stationary at the scripted depth.
    const FingerTick& f = t.fingers[drone];
    if (f.velocity.norm() == 0.0 && f.position.z() == hold_z) {
      held.push_back(d.tether.tension);
      if (d.tether.tension > 0.0)
        horizontal = std::max({horizontal, std::abs(d.tether.on_finger.x()) / d.tether.tension,
                               std::abs(d.tether.on_finger.y()) / d.tether.tension});
    }
  }
  if (held.empty()) return {false, "finger never holds at the scripted depth"};
  // Steady state: final 20% of the hold.
  const std::size_t tail = std::max<std::size_t>(1, held.size() / 5);
  double tension = 0.0;
  for (std::size_t i = held.size() - tail; i < held.size(); ++i) tension += held[i];
  tension /= static_cast<double>(tail);
  const double err = std::abs(tension - command) / command;
  const double tilt_deg = tilt * 180.0 / 3.14159265358979323846;
  return {err < 0.10 && tilt_deg < 5.0 && horizontal < 0.10,
          fmt("steady tension %.4f N vs %.1f N (err %.2f%%, limit 10%%), ", tension, command, 100 * err) +
              fmt("max tilt %.2f deg (limit 5), max horizontal/tension %.3f (limit 0.1)", tilt_deg,
                  horizontal)};
}

// 6. Tether physics on random inputs and on logged ticks.
Outcome tether_physics() {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> pos(-1.0, 1.0), vel(-3.0, 3.0), rest(0.05, 1.5),
      k(0.1, 200.0), c(0.0, 5.0), coin(0.0, 1.0);
  long third_law = 0, slack_nonzero = 0, negative = 0;
  for (long i = 0; i < 1000000; ++i) {
    TetherParams p;
    p.kind = coin(rng) < 0.5 ? TetherKind::Elastic : TetherKind::Inextensible;
    p.rest_length = rest(rng);
    p.stiffness = k(rng);
    p.damping = c(rng);
    p.constraint_stiffness = 10 * k(rng);
    p.constraint_damping = c(rng);
    const Vec3 a(pos(rng), pos(rng), pos(rng)), b(pos(rng), pos(rng), pos(rng));
    const TetherForce f =
        tether_force(a, Vec3(vel(rng), vel(rng), vel(rng)), b, Vec3(vel(rng), vel(rng), vel(rng)), p);
    if (f.on_drone != -f.on_finger) ++third_law;
    if (!(f.tension >= 0.0)) ++negative;
    if ((a - b).norm() <= p.rest_length &&
        (f.taut || f.tension != 0.0 || f.on_finger != Vec3::Zero() || f.on_drone != Vec3::Zero()))
      ++slack_nonzero;
  }
  long logged = 0, logged_bad = 0;
  for (const char* name : {"chord", "three_groups", "dual_tether"}) {
    const RunResult r = run_scenario(name);
    for (const TickRecord& t : r.log.ticks)
      for (const DroneTick& d : t.drones) {
        ++logged;
        if (d.tether.on_drone != -d.tether.on_finger || d.tether.tension < 0.0 ||
            (!d.tether.taut && d.tether.on_finger != Vec3::Zero()))
          ++logged_bad;
      }
  }
  std::ostringstream os;
  os << "1e6 random inputs: " << third_law << " third-law, " << slack_nonzero
     << " slack-nonzero, " << negative << " negative-tension violations; " << logged
     << " logged tether ticks: " << logged_bad << " violations";
  return {third_law == 0 && slack_nonzero == 0 && negative == 0 && logged_bad == 0, os.str()};
}

// 7. Predicted time to contact against the crossing seen in the simulation.
Outcome contact_prediction() {
  SimConfig c;
  c.duration = 1.5;
  c.drones.assign(5, DroneConfig{});
  c.tethers.push_back(TetherParams{});
  c.mocap.position_noise_std = 0.0;
  c.mocap.attitude_noise_std = 0.0;
  c.mocap.latency = 0.0;
  VirtualSurface plane;
  plane.height = 0.8;
  c.surfaces.push_back(plane);
  const std::array<double, 5> speed{0.05, 0.1, 0.2, 0.4, 0.8};
  const std::array<double, 5> crossing{0.5531, 0.6237, 0.7071, 0.7773, 0.8913};
  HandTrajectory hand;
  HandTrajectory::Sample a, b;
  for (std::size_t f = 0; f < 5; ++f) {
    const double z0 = plane.height + speed[f] * crossing[f];
    a[f] = Vec3(0.3 * f, 0.0, z0);
    b[f] = Vec3(0.3 * f, 0.0, z0 - 2.0 * speed[f]);
  }
  hand.add_sample(0.0, a);
  hand.add_sample(2.0, b);
  const RunResult r = run(c, hand);
  const SimLog& log = r.log;

  double worst = 0.0;
  int checked = 0;
  bool all_fingers = true;
  for (std::size_t f = 0; f < 5; ++f) {
    // Crossing time interpolated between the logged ticks that straddle it.
    double t_cross = -1.0;
    for (std::size_t k = 1; k < log.ticks.size() && t_cross < 0.0; ++k) {
      const double z0 = log.ticks[k - 1].fingers[f].position.z();
      const double z1 = log.ticks[k].fingers[f].position.z();
      if (z0 > plane.height && z1 <= plane.height)
        t_cross = log.ticks[k - 1].t + (z0 - plane.height) / (z0 - z1) * c.physics_dt;
    }
    int n = 0;
    for (std::size_t k = 0; k < log.ticks.size(); k += c.control_divider()) {
      const FingerTick& ft = log.ticks[k].fingers[f];
      if (ft.status != ContactStatus::Approaching) continue;
      worst = std::max(worst, std::abs(log.ticks[k].t + ft.time_to_contact - t_cross));
      ++n;
    }
    checked += n;
    all_fingers = all_fingers && n > 0 && t_cross > 0.0;
  }
  return {all_fingers && worst <= 0.010,
          fmt("%g predictions over 5 descent speeds, worst |t+ttc - crossing| = %.3g ms (limit 10 ms)",
              checked, 1e3 * worst)};
}

// 8. Per-drone rendering in the chord and three-group scenarios. The oracle is
// the deepest finger's penalty force on the true finger state, split across
// the drones sharing it.
Outcome multi_drone() {
  std::ostringstream os;
  bool ok = true;
  for (const char* name : {"chord", "three_groups"}) {
    const SimConfig cfg = load_config(scenario(std::string(name) + ".json"));
    const RunResult r = run(cfg, load_hand_trajectory(scenario(std::string(name) + ".csv")));
    std::vector<int> ids(cfg.drones.size());
    for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<int>(i);
    const FingerAssignment asg = assign_drones(ids, cfg.assignment, cfg.tethers);
    std::vector<bool> reached(cfg.drones.size(), false);
    double worst = 0.0;
    for (const ContactMetrics& c : r.metrics.contacts) {
      const DroneBinding& b = *asg.binding_for(c.drone);
      const double target = steady_mean(r.log, c, [&](const TickRecord& t) {
        double deepest = 0.0;
        for (Finger f : b.fingers) deepest = std::max(deepest, t.fingers[index_of(f)].desired.z());
        return deepest;
      });
      const double delivered = steady_mean(
          r.log, c, [&](const TickRecord& t) { return t.drones[c.drone].tether.tension; });
      if (target <= 0.0) continue;
      const double err = std::abs(delivered - target) / target;
      worst = std::max(worst, err);
      if (err <= 0.10) reached[c.drone] = true;
    }
    const auto n = std::count(reached.begin(), reached.end(), true);
    ok = ok && worst <= 0.10 && n == static_cast<long>(reached.size());
    os << name << ": " << n << "/" << reached.size() << " drones within 10%, worst "
       << fmt("%.2f%%", 100 * worst) << "; ";
  }
  return {ok, os.str()};
}

// 9. Byte-identical serialized logs.
Outcome determinism() {
  const std::string a = log_to_string(run_scenario("chord").log);
  const std::string b = log_to_string(run_scenario("chord").log);
  return {a == b && !a.empty(), fmt("two chord runs, %g bytes each, identical: ", a.size()) +
                                    (a == b ? "yes" : "no")};
}

// 10. Piano scenario wall-clock.
Outcome performance() {
  const SimConfig cfg = load_config(scenario("piano.json"));
  const HandTrajectory hand = load_hand_trajectory(scenario("piano.csv"));
  const auto t0 = std::chrono::steady_clock::now();
  const RunResult r = run(cfg, hand);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool shape = cfg.drones.size() == 5 && r.log.ticks.size() == 60000;
  return {shape && wall < 60.0,
          fmt("%g drones x %g ticks in %.2f s wall-clock (limit 60 s)",
              static_cast<double>(cfg.drones.size()), static_cast<double>(r.log.ticks.size()), wall)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"mixer moment rows", mixer_fidelity},
      {"uniform-yaw matrix rank", uniform_matrix_rank},
      {"allocation round-trip", allocation_round_trip},
      {"follow-mode hover", hover},
      {"1 N force rendering", force_rendering},
      {"tether physics", tether_physics},
      {"contact prediction", contact_prediction},
      {"multi-drone rendering", multi_drone},
      {"determinism", determinism},
      {"piano performance", performance},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("[%s] %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                o.detail.c_str());
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
