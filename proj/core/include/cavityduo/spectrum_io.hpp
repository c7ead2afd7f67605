#pragma once

#include <iosfwd>
#include <string>

#include "cavityduo/coefficients.hpp"

namespace cavityduo {

/// Reads `omega,D,re_alpha,im_alpha,re_beta,im_beta` CSV. tau_c is not part of
/// the file and is supplied by the caller. Throws ParseError with line context.
ReservoirSpectrum read_spectrum_csv(std::istream& in, double tau_c);
ReservoirSpectrum read_spectrum_csv(const std::string& path, double tau_c);

void write_spectrum_csv(std::ostream& out, const ReservoirSpectrum& spectrum);

}  // namespace cavityduo
