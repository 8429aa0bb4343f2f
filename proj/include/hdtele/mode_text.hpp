#pragma once

#include "hdtele/modes.hpp"

#include <string>

namespace hdtele {

// Text form of a mode:
//   lg:ell=1,p=0        hg:n=2,m=0        gauss        vortex:ell=2
//   frac:M=0.5,offset=0
//   sup:(0.707,lg:ell=1)+(0.707i,lg:ell=-1)
// Any primitive accepts w_um=<waist in micrometres>; otherwise default_waist
// (metres) is used. Superposition coefficients are normalised on parsing.
ModeSpec parse_mode(const std::string& text, double default_waist);

// Complex literal: 0.5, -2i, i, 1-0.5i.
cplx parse_complex(const std::string& text);

// Canonical text; the waist is included only when requested.
std::string format_mode(const ModeSpec& spec, bool with_waist = false);

}  // namespace hdtele
