#pragma once

// Per-node four-mode energy bookkeeping. A frame of b bits occupies the
// radio for b / bitrate seconds; transmit time is billed at tx_w, receive
// and overhear time at rx_w, and whatever is left of the run is billed as
// idle listening, also at rx_w.

#include <algorithm>
#include <stdexcept>

#include "core.hpp"

namespace manetsim {

struct PowerProfile {
  double tx_w = 0.330;        // watts while transmitting
  double rx_w = 0.230;        // watts while receiving
  double initial_j = 1000.0;  // battery at run start
  double bitrate_bps = 2e6;   // channel rate used to convert bits to seconds

  double idle_w() const { return rx_w; }      // listening costs as much as receiving
  double overhear_w() const { return rx_w; }  // decoding a neighbour's frame, too
};

class EnergyMeter {
 public:
  EnergyMeter() = default;
  explicit EnergyMeter(PowerProfile profile) : profile_(profile) {}

  void charge_tx(int size_bytes) { charge(size_bytes, profile_.tx_w, e_tx_); }
  void charge_rx(int size_bytes) { charge(size_bytes, profile_.rx_w, e_rx_); }
  void charge_overhear(int size_bytes) { charge(size_bytes, profile_.overhear_w(), e_over_); }

  // Called exactly once at run end: everything that was not airtime is idle.
  void finalize_idle(SimTime run_duration) {
    if (finalized_) throw invariant_error("finalize_idle: called twice");
    if (busy_time_ > run_duration + 1e-9)
      throw invariant_error("finalize_idle: accounted busy time exceeds run duration");
    e_idle_ = profile_.idle_w() * std::max(0.0, run_duration - busy_time_);
    finalized_ = true;
  }

  double e_tx() const { return e_tx_; }
  double e_rx() const { return e_rx_; }
  double e_idle() const { return e_idle_; }
  double e_over() const { return e_over_; }
  double busy_time() const { return busy_time_; }
  bool finalized() const { return finalized_; }
  const PowerProfile& profile() const { return profile_; }

  double consumed() const { return e_tx_ + e_rx_ + e_idle_ + e_over_; }
  double remaining() const { return profile_.initial_j - consumed(); }

  // Battery estimate mid-run, counting idle time accrued so far. Used to
  // stop dead nodes from transmitting or receiving.
  double remaining_at(SimTime t) const {
    double idle_so_far = profile_.idle_w() * std::max(0.0, t - busy_time_);
    return profile_.initial_j - (e_tx_ + e_rx_ + e_over_ + idle_so_far);
  }
  bool alive_at(SimTime t) const { return remaining_at(t) > 0.0; }

 private:
  void charge(int size_bytes, double watts, double& account) {
    if (size_bytes <= 0) throw std::invalid_argument("charge: frame must carry at least one byte");
    double seconds = static_cast<double>(size_bytes) * 8.0 / profile_.bitrate_bps;
    account += watts * seconds;
    busy_time_ += seconds;
  }

  PowerProfile profile_;
  double e_tx_ = 0;
  double e_rx_ = 0;
  double e_idle_ = 0;
  double e_over_ = 0;
  double busy_time_ = 0;
  bool finalized_ = false;
};

}  // namespace manetsim
