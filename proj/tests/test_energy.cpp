// Per-node energy accounting. The charge constants below were computed by
// hand from the power model (watts x seconds at the 2 Mb/s serialization
// rate) and are frozen here as independent expected values.

#include <catch2/catch_amalgamated.hpp>

#include <stdexcept>

#include <manetsim/energy.hpp>

using namespace manetsim;
using Catch::Matchers::WithinRel;
using Catch::Matchers::WithinAbs;

TEST_CASE("default power profile") {
  PowerProfile p;
  CHECK(p.tx_w == 0.330);
  CHECK(p.rx_w == 0.230);
  CHECK(p.idle_w() == 0.230);      // listening costs the same whether or not
  CHECK(p.overhear_w() == 0.230);  // a frame is on the air
  CHECK(p.initial_j == 1000.0);
  CHECK(p.bitrate_bps == 2.0e6);
}

TEST_CASE("transmit and receive charges for a 512-byte frame") {
  // 512 bytes = 4096 bits; at 2 Mb/s that is 2.048 ms on the air.
  // tx: 0.330 W * 2.048e-3 s = 6.7584e-4 J
  // rx: 0.230 W * 2.048e-3 s = 4.7104e-4 J
  EnergyMeter tx_meter{PowerProfile{}};
  tx_meter.charge_tx(512);
  CHECK_THAT(tx_meter.e_tx(), WithinRel(6.7584e-4, 1e-12));

  EnergyMeter rx_meter{PowerProfile{}};
  rx_meter.charge_rx(512);
  CHECK_THAT(rx_meter.e_rx(), WithinRel(4.7104e-4, 1e-12));

  EnergyMeter over_meter{PowerProfile{}};
  over_meter.charge_overhear(512);
  CHECK_THAT(over_meter.e_over(), WithinRel(4.7104e-4, 1e-12));
}

TEST_CASE("charges are linear in frame size") {
  EnergyMeter a{PowerProfile{}};
  EnergyMeter b{PowerProfile{}};
  a.charge_tx(128);
  a.charge_tx(128);
  b.charge_tx(256);
  CHECK_THAT(a.e_tx(), WithinRel(b.e_tx(), 1e-12));
  CHECK_THAT(b.e_tx(), WithinRel(2.0 * 0.330 * 128 * 8 / 2.0e6, 1e-12));
}

TEST_CASE("zero or negative frame sizes are rejected") {
  EnergyMeter m{PowerProfile{}};
  CHECK_THROWS_AS(m.charge_tx(0), std::invalid_argument);
  CHECK_THROWS_AS(m.charge_rx(-1), std::invalid_argument);
  CHECK_THROWS_AS(m.charge_overhear(0), std::invalid_argument);
}

TEST_CASE("a silent node spends only idle power") {
  // 300 s of pure listening: 0.230 W * 300 s = 69 J, leaving 931 J
  EnergyMeter m{PowerProfile{}};
  m.finalize_idle(300.0);
  CHECK_THAT(m.e_idle(), WithinRel(69.0, 1e-12));
  CHECK_THAT(m.remaining(), WithinRel(931.0, 1e-12));
  CHECK(m.e_tx() == 0.0);
  CHECK(m.e_rx() == 0.0);
  CHECK(m.e_over() == 0.0);
}

TEST_CASE("idle time is the run duration minus radio-busy time") {
  EnergyMeter m{PowerProfile{}};
  m.charge_tx(512);       // 2.048 ms busy
  m.charge_rx(512);       // 2.048 ms busy
  m.charge_overhear(256); // 1.024 ms busy
  m.finalize_idle(10.0);
  double busy = (2 * 2.048e-3) + 1.024e-3;
  CHECK_THAT(m.e_idle(), WithinRel(0.230 * (10.0 - busy), 1e-12));
}

TEST_CASE("finalize_idle can only run once") {
  EnergyMeter m{PowerProfile{}};
  m.finalize_idle(10.0);
  CHECK_THROWS_AS(m.finalize_idle(10.0), std::logic_error);
}

TEST_CASE("busy time beyond the run duration is an accounting error") {
  EnergyMeter m{PowerProfile{}};
  for (int i = 0; i < 1000; ++i) m.charge_tx(512);  // ~2.05 s busy
  CHECK_THROWS_AS(m.finalize_idle(1.0), std::logic_error);
}

TEST_CASE("consumed equals the sum of the four accounts") {
  EnergyMeter m{PowerProfile{}};
  m.charge_tx(512);
  m.charge_tx(48);
  m.charge_rx(512);
  m.charge_overhear(512);
  m.charge_overhear(44);
  m.finalize_idle(60.0);
  double total = m.e_tx() + m.e_rx() + m.e_idle() + m.e_over();
  CHECK_THAT(m.consumed(), WithinRel(total, 1e-12));
  CHECK_THAT(m.remaining(), WithinRel(1000.0 - total, 1e-12));
}

TEST_CASE("projected remaining charge over time") {
  EnergyMeter m{PowerProfile{}};
  // before finalize: remaining_at(t) assumes idle fills the gap up to t
  CHECK_THAT(m.remaining_at(100.0), WithinRel(1000.0 - 23.0, 1e-12));
  CHECK(m.alive_at(100.0));
  // a node is only dead once the budget is gone; 1000 J / 0.23 W > 4000 s
  CHECK(m.alive_at(4000.0));
  CHECK_FALSE(m.alive_at(5000.0));
}
