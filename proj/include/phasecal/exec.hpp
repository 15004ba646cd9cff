// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace phasecal {

// Instance loops exist twice: a plain serial reference and an OpenMP variant.
// Both fill index-addressed slots and reduce in fixed order, so they produce
// bitwise identical results; tests hold them to that.
enum class Exec { Serial, Parallel };

}  // namespace phasecal
