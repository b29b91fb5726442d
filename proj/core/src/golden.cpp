#include "iln/golden.hpp"

namespace iln::golden {

namespace {

constexpr Complex J{0.0, 1.0};

CVector vec2(Complex a, Complex b) {
  CVector v(2);
  v << a, b;
  return v;
}

}  // namespace

Scenario scenario() {
  Scenario s;
  s.num_users = 2;
  s.num_subcarriers = 2;
  s.relay_antennas = 2;
  // Budgets match the reference precoders' powers exactly; the relay budget
  // leaves headroom above the null-shifted relay's transmit power (~31.9).
  s.tx_power_budget = {2.0, 34.0};
  s.relay_power_budget = 100.0;
  s.streams = {1, 2};
  return s;
}

ChannelSet channels() {
  ChannelSet ch(2, 2, 2);
  ch.set_direct(0, 0, 0, 0.5129 + 0.4605 * J);
  ch.set_direct(0, 0, 1, 0.3504 + 0.0950 * J);
  ch.set_direct(1, 0, 0, 0.4337 + 0.0709 * J);
  ch.set_direct(1, 0, 1, 0.1160 + 0.0078 * J);
  ch.set_direct(0, 1, 0, 0.3693 + 0.0336 * J);
  ch.set_direct(0, 1, 1, 0.1922 + 0.4714 * J);
  ch.set_direct(1, 1, 0, 0.1449 + 0.0718 * J);
  ch.set_direct(1, 1, 1, 0.6617 + 0.0432 * J);

  ch.set_uplink(0, 0, vec2(0.1194 + 0.8624 * J, 0.6344 + 0.1582 * J));
  ch.set_uplink(0, 1, vec2(0.6012 + 0.6261 * J, 0.1176 + 0.8351 * J));
  ch.set_uplink(1, 0, vec2(0.9404 + 0.2720 * J, 0.4156 + 0.9280 * J));
  ch.set_uplink(1, 1, vec2(0.9213 + 0.8129 * J, 0.5420 + 0.1664 * J));

  ch.set_downlink(0, 0, vec2(0.4460 + 0.5281 * J, 0.5083 + 0.5729 * J));
  ch.set_downlink(0, 1, vec2(0.3608 + 0.1733 * J, 0.3365 + 0.0861 * J));
  ch.set_downlink(1, 0, vec2(0.3933 + 0.0111 * J, 0.8044 + 0.2331 * J));
  ch.set_downlink(1, 1, vec2(0.9339 + 0.7859 * J, 0.2268 + 0.4107 * J));
  return ch;
}

Precoders precoders() {
  CMatrix p1(2, 2);
  p1 << 1, 0, 1, 0;
  CMatrix p2(2, 2);
  p2 << 1, 4, -4, 1;
  return Precoders::from_matrices({p1, p2});
}

CMatrix relay_min_norm() {
  CMatrix r(4, 4);
  r << -0.0364 - 0.0035 * J, -0.1793 - 0.0233 * J, 0.0234 - 0.0575 * J,
      0.0574 + 0.0596 * J,  //
      -0.1046 + 0.0925 * J, -0.2837 - 0.0390 * J, -0.0832 - 0.0249 * J,
      0.0029 + 0.1567 * J,  //
      0.2729 + 0.0708 * J, -0.1376 + 0.1714 * J, -0.3130 - 0.2977 * J,
      0.2012 - 0.1606 * J,  //
      0.0529 + 0.0099 * J, -0.1388 + 0.0348 * J, -0.4690 - 0.3154 * J,
      -0.0414 - 0.1751 * J;
  return r;
}

CMatrix relay_block_diag() {
  CMatrix r = CMatrix::Zero(4, 4);
  r.topLeftCorner(2, 2) = relay_min_norm().topLeftCorner(2, 2);
  r.bottomRightCorner(2, 2) = relay_min_norm().bottomRightCorner(2, 2);
  return r;
}

CMatrix relay_null_shifted() {
  CMatrix r(4, 4);
  r << -0.2709 + 0.2267 * J, -0.0820 + 0.1738 * J, -0.0770 + 0.0704 * J,
      -0.1357 + 0.1183 * J,  //
      -0.1509 + 0.0212 * J, -0.3225 - 0.4885 * J, -0.2088 - 0.0485 * J,
      0.6810 + 0.1046 * J,  //
      0.2459 + 0.1223 * J, -0.1315 + 0.0682 * J, -0.2702 - 0.2781 * J,
      0.2683 - 0.2842 * J,  //
      -0.0155 + 0.1640 * J, -0.2285 - 0.0472 * J, -0.5114 - 0.2436 * J,
      -0.0346 - 0.1960 * J;
  return r;
}

}  // namespace iln::golden
