#pragma once

#include <string>
#include <vector>

#include "nls/evolve.hpp"
#include "nls/imethod.hpp"
#include "nls/modulation.hpp"

namespace nls {

// FNV-1a over a canonical string; stable across runs and platforms.
std::string content_hash(const std::string& text);

void ensure_dir(const std::string& path);

void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

void write_conserved_csv(const std::string& path, const Trajectory& traj);
void write_modulation_csv(const std::string& path, const ModulationSeries& series);
void write_imethod_csv(const std::string& path,
                       const AlmostConservationReport& report);

}  // namespace nls
