#pragma once

#include "iln/channel.hpp"

// Reference two-user, two-subcarrier, two-antenna instance with known
// neutralizing relay matrices and their sum secrecy rates. Used by the
// replay-table1 CLI subcommand and by the test suites.
namespace iln::golden {

Scenario scenario();
ChannelSet channels();
Precoders precoders();

CMatrix relay_min_norm();      // minimum-norm neutralizing relay
CMatrix relay_block_diag();    // its block-diagonal truncation
CMatrix relay_null_shifted();  // a null-space-shifted neutralizing relay

inline constexpr double kSumSecrecyMinNorm = 3.4104;
inline constexpr double kSumSecrecyBlockDiag = 3.1881;
inline constexpr double kSumSecrecyNullShifted = 4.1553;

}  // namespace iln::golden
