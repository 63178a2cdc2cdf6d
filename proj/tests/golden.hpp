#pragma once

// Reference map coefficients from an independent dense matrix exponential of
// the boson Hamiltonian (Fock space 0..N+1), omega0 = omega = 1, T = 1.
// Frozen; do not regenerate from this library.

#include <array>

namespace golden {

struct Point {
  int n_spins;
  double delta;
  double t;
  double alpha1;
  double alpha2;
  double zeta_re;
  double zeta_im;
};

inline constexpr std::array<Point, 6> coefficients{{
    {100, 0.010, 10.0, 0.011316499919386332, 0.011122628120117705, -0.7586354126556824, 0.6341053087906018},
    {100, 0.010, 50.0, 2.254103664617905e-05, 2.2422216105542942e-05, 0.9484721031267624, -0.3145759194390859},
    {100, 0.010, 100.0, 8.99396100511397e-05, 8.946544884733187e-05, 0.7994654929653942, -0.595898371483445},
    {20, 0.003, 10.0, 0.0002528892511779436, 0.00023280520576671805, -0.8291188090313396, 0.5585744113076638},
    {20, 0.003, 50.0, 0.00011436955840767538, 0.0001048731429526497, 0.9833214840143424, 0.17630269729444636},
    {20, 0.003, 100.0, 0.00025608648989778894, 0.00023560148548092537, 0.934072378714357, 0.34627712766625657},
}};

} // namespace golden
