#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "qipf/analysis.hpp"
#include "qipf/engine.hpp"
#include "qipf/signal.hpp"

namespace qipf {

/// All CSV numeric output uses 17 significant digits so values round-trip
/// through text exactly.
std::string format_double(double v);

void write_signal_csv(const std::filesystem::path& path, const Signal& signal);
Signal read_signal_csv(const std::filesystem::path& path);

/// Raw little-endian IEEE-754 doubles, no header.
void write_signal_raw(const std::filesystem::path& path, const Signal& signal);
Signal read_signal_raw(const std::filesystem::path& path);

/// Trace schema: index,x,psi, then ratio_k,eigen_k,qipf_k per mode.
void write_trace_csv(const std::filesystem::path& path, const DecompositionTrace& trace);
DecompositionTrace read_trace_csv(const std::filesystem::path& path);

/// Generic rectangular CSV: named columns of equal length.
void write_columns_csv(const std::filesystem::path& path,
                       const std::vector<std::string>& names,
                       const std::vector<std::span<const double>>& columns);

/// 16-bit binary PGM (P5), one row per mode, values scaled from [0,1].
void write_heatmap_pgm(const std::filesystem::path& path, const HeatmapMatrix& heatmap);

/// Minimal SVG polyline chart of one or more series against a shared x.
void write_svg_lines(const std::filesystem::path& path, std::span<const double> x,
                     const std::vector<std::pair<std::string, std::span<const double>>>& series,
                     const std::string& title);

/// Grayscale SVG heat plot (one rect per cell, column-downsampled when wide).
void write_svg_heatmap(const std::filesystem::path& path, const HeatmapMatrix& heatmap,
                       const std::string& title);

}  // namespace qipf
