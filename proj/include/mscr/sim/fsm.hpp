#pragma once
// Insertion phases and the FBG shape-consistency monitor.

#include <mscr/common.hpp>

#include <optional>
#include <string>
#include <string_view>

namespace mscr::sim {

enum class Phase { align, advance, pause_realign, hold, done, abort };

inline std::string_view phase_name(Phase p) {
  switch (p) {
    case Phase::align: return "ALIGN";
    case Phase::advance: return "ADVANCE";
    case Phase::pause_realign: return "PAUSE_REALIGN";
    case Phase::hold: return "HOLD";
    case Phase::done: return "DONE";
    case Phase::abort: return "ABORT";
  }
  return "UNKNOWN";
}

inline Phase phase_from_name(std::string_view s) {
  for (Phase p : {Phase::align, Phase::advance, Phase::pause_realign, Phase::hold, Phase::done, Phase::abort})
    if (phase_name(p) == s) return p;
  throw DomainError("unknown phase '" + std::string(s) + "'");
}

inline bool is_terminal(Phase p) { return p == Phase::done || p == Phase::abort; }

/// What the phase machine sees on one tick.
struct FsmInputs {
  std::optional<double> theta_err;  // absent when a detection is missing
  bool interrupt = false;
  bool resume = false;               // resume after validation, or a switch to manual
  bool abort = false;
  bool fbg_flag = false;
  bool depth_reached = false;
};

/// Next phase. A missing detection leaves the phase unchanged; the caller
/// withholds advance on such ticks.
inline Phase insertion_fsm(Phase current, const FsmInputs& in, double align_threshold) {
  if (is_terminal(current)) return current;
  if (in.abort) return Phase::abort;
  if (in.interrupt || in.fbg_flag) return Phase::hold;
  if (current == Phase::hold) return in.resume ? Phase::align : Phase::hold;
  if (in.depth_reached) return Phase::done;
  if (!in.theta_err) return current;
  const bool aligned = std::abs(*in.theta_err) < align_threshold;
  switch (current) {
    case Phase::align: return aligned ? Phase::advance : Phase::align;
    case Phase::advance: return aligned ? Phase::advance : Phase::pause_realign;
    case Phase::pause_realign: return aligned ? Phase::advance : Phase::pause_realign;
    default: return current;
  }
}

/// Raises a flag when the commanded and measured tip angles disagree by more
/// than the tolerance on `frames` consecutive readings. The flag fires once
/// per run of disagreeing frames.
class FbgMonitor {
 public:
  FbgMonitor() = default;
  FbgMonitor(double tolerance, int frames) : tolerance_(tolerance), frames_(frames) {
    require(tolerance > 0.0, "FBG tolerance must be > 0");
    require(frames >= 1, "FBG consecutive-frame count must be >= 1");
  }

  bool update(double commanded, double measured) {
    if (std::abs(commanded - measured) > tolerance_) {
      ++count_;
    } else {
      count_ = 0;
    }
    return count_ == frames_;
  }

  int consecutive() const { return count_; }
  void reset() { count_ = 0; }

 private:
  double tolerance_ = deg2rad(2.0);
  int frames_ = 3;
  int count_ = 0;
};

}  // namespace mscr::sim
