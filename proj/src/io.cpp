#include "qipf/io.hpp"

#include <algorithm>
#include <bit>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace qipf {

namespace {

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = {}) {
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, mode);
    if (!out)
        throw std::runtime_error("cannot open for writing: " + path.string());
    return out;
}

std::ifstream open_in(const std::filesystem::path& path, std::ios::openmode mode = {}) {
    std::ifstream in(path, mode);
    if (!in)
        throw std::runtime_error("cannot open for reading: " + path.string());
    return in;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream ss(line);
    while (std::getline(ss, cur, ','))
        out.push_back(cur);
    return out;
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_signal_csv(const std::filesystem::path& path, const Signal& signal) {
    auto out = open_out(path);
    out << "index,value\n";
    for (std::size_t i = 0; i < signal.samples.size(); ++i)
        out << i << ',' << format_double(signal.samples[i]) << '\n';
}

Signal read_signal_csv(const std::filesystem::path& path) {
    auto in = open_in(path);
    Signal s;
    s.label = path.filename().string();
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        if (first) {
            first = false;
            if (line.rfind("index", 0) == 0)
                continue;  // header
        }
        const auto fields = split_csv_line(line);
        if (fields.size() < 2)
            throw std::runtime_error("malformed signal CSV line: " + line);
        s.samples.push_back(std::stod(fields[1]));
    }
    if (s.samples.empty())
        throw std::runtime_error("signal CSV has no samples: " + path.string());
    return s;
}

void write_signal_raw(const std::filesystem::path& path, const Signal& signal) {
    auto out = open_out(path, std::ios::binary);
    for (double v : signal.samples) {
        const auto bits = std::bit_cast<std::uint64_t>(v);
        unsigned char bytes[8];
        for (int b = 0; b < 8; ++b)
            bytes[b] = static_cast<unsigned char>((bits >> (8 * b)) & 0xFF);
        out.write(reinterpret_cast<const char*>(bytes), 8);
    }
}

Signal read_signal_raw(const std::filesystem::path& path) {
    auto in = open_in(path, std::ios::binary);
    Signal s;
    s.label = path.filename().string();
    unsigned char bytes[8];
    while (in.read(reinterpret_cast<char*>(bytes), 8)) {
        std::uint64_t bits = 0;
        for (int b = 7; b >= 0; --b)
            bits = (bits << 8) | bytes[b];
        s.samples.push_back(std::bit_cast<double>(bits));
    }
    if (s.samples.empty())
        throw std::runtime_error("raw signal file is empty: " + path.string());
    return s;
}

void write_trace_csv(const std::filesystem::path& path, const DecompositionTrace& trace) {
    auto out = open_out(path);
    out << "index,x,psi";
    for (int k = 1; k <= trace.modes; ++k)
        out << ",ratio_" << k << ",eigen_" << k << ",qipf_" << k;
    out << '\n';
    for (std::size_t row = 0; row < trace.rows(); ++row) {
        out << trace.index[row] << ',' << format_double(trace.x[row]) << ','
            << format_double(trace.psi[row]);
        for (int k = 1; k <= trace.modes; ++k)
            out << ',' << format_double(trace.ratio_at(row, k)) << ','
                << format_double(trace.eigen_at(row, k)) << ','
                << format_double(trace.qipf_at(row, k));
        out << '\n';
    }
}

DecompositionTrace read_trace_csv(const std::filesystem::path& path) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("trace CSV is empty: " + path.string());
    const auto header = split_csv_line(line);
    if (header.size() < 6 || header[0] != "index" || (header.size() - 3) % 3 != 0)
        throw std::runtime_error("unexpected trace CSV header: " + path.string());
    DecompositionTrace tr;
    tr.modes = static_cast<int>((header.size() - 3) / 3);
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        const auto f = split_csv_line(line);
        if (f.size() != header.size())
            throw std::runtime_error("malformed trace CSV row: " + line);
        tr.index.push_back(std::stol(f[0]));
        tr.x.push_back(std::stod(f[1]));
        tr.psi.push_back(std::stod(f[2]));
        for (int k = 0; k < tr.modes; ++k) {
            tr.ratio.push_back(std::stod(f[3 + 3 * static_cast<std::size_t>(k)]));
            tr.eigen.push_back(std::stod(f[4 + 3 * static_cast<std::size_t>(k)]));
            tr.qipf.push_back(std::stod(f[5 + 3 * static_cast<std::size_t>(k)]));
        }
    }
    tr.flagged.assign(tr.ratio.size(), 0);
    return tr;
}

void write_columns_csv(const std::filesystem::path& path,
                       const std::vector<std::string>& names,
                       const std::vector<std::span<const double>>& columns) {
    if (names.size() != columns.size() || columns.empty())
        throw std::invalid_argument("write_columns_csv: names/columns mismatch");
    const std::size_t n = columns[0].size();
    for (const auto& c : columns)
        if (c.size() != n)
            throw std::invalid_argument("write_columns_csv: ragged columns");
    auto out = open_out(path);
    for (std::size_t j = 0; j < names.size(); ++j)
        out << (j ? "," : "") << names[j];
    out << '\n';
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < columns.size(); ++j)
            out << (j ? "," : "") << format_double(columns[j][i]);
        out << '\n';
    }
}

void write_heatmap_pgm(const std::filesystem::path& path, const HeatmapMatrix& heatmap) {
    auto out = open_out(path, std::ios::binary);
    out << "P5\n" << heatmap.samples << ' ' << heatmap.modes << "\n65535\n";
    for (int k = 1; k <= heatmap.modes; ++k) {
        for (std::size_t i = 0; i < heatmap.samples; ++i) {
            const double v = std::clamp(heatmap.at(k, i), 0.0, 1.0);
            const auto q = static_cast<std::uint16_t>(std::lround(v * 65535.0));
            // PGM stores the most significant byte first.
            const unsigned char hi = static_cast<unsigned char>(q >> 8);
            const unsigned char lo = static_cast<unsigned char>(q & 0xFF);
            out.put(static_cast<char>(hi));
            out.put(static_cast<char>(lo));
        }
    }
}

namespace {

struct SvgFrame {
    static constexpr double width = 900.0;
    static constexpr double height = 420.0;
    static constexpr double margin = 50.0;

    double x_lo, x_hi, y_lo, y_hi;

    double px(double x) const {
        return margin + (x - x_lo) / (x_hi - x_lo) * (width - 2 * margin);
    }
    double py(double y) const {
        return height - margin - (y - y_lo) / (y_hi - y_lo) * (height - 2 * margin);
    }
};

const char* kSeriesColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                               "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

}  // namespace

void write_svg_lines(const std::filesystem::path& path, std::span<const double> x,
                     const std::vector<std::pair<std::string, std::span<const double>>>& series,
                     const std::string& title) {
    if (x.empty() || series.empty())
        throw std::invalid_argument("write_svg_lines: empty input");
    SvgFrame f{};
    f.x_lo = *std::min_element(x.begin(), x.end());
    f.x_hi = *std::max_element(x.begin(), x.end());
    f.y_lo = series[0].second[0];
    f.y_hi = f.y_lo;
    for (const auto& [name, ys] : series)
        for (double v : ys) {
            f.y_lo = std::min(f.y_lo, v);
            f.y_hi = std::max(f.y_hi, v);
        }
    if (f.x_hi == f.x_lo)
        f.x_hi = f.x_lo + 1.0;
    if (f.y_hi == f.y_lo)
        f.y_hi = f.y_lo + 1.0;

    auto out = open_out(path);
    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << SvgFrame::width
        << "' height='" << SvgFrame::height << "'>\n";
    out << "<rect width='100%' height='100%' fill='white'/>\n";
    out << "<text x='" << SvgFrame::width / 2 << "' y='24' text-anchor='middle' "
        << "font-family='sans-serif' font-size='16'>" << title << "</text>\n";
    std::size_t idx = 0;
    for (const auto& [name, ys] : series) {
        const char* color = kSeriesColors[idx % 10];
        out << "<polyline fill='none' stroke='" << color << "' stroke-width='1.2' points='";
        for (std::size_t i = 0; i < x.size() && i < ys.size(); ++i)
            out << f.px(x[i]) << ',' << f.py(ys[i]) << ' ';
        out << "'/>\n";
        out << "<text x='" << SvgFrame::width - SvgFrame::margin + 4 << "' y='"
            << 40 + 16 * idx << "' font-family='sans-serif' font-size='11' fill='" << color
            << "' text-anchor='end'>" << name << "</text>\n";
        ++idx;
    }
    out << "</svg>\n";
}

void write_svg_heatmap(const std::filesystem::path& path, const HeatmapMatrix& heatmap,
                       const std::string& title) {
    const std::size_t max_cols = 1200;
    const std::size_t stride = std::max<std::size_t>(1, heatmap.samples / max_cols);
    const std::size_t cols = (heatmap.samples + stride - 1) / stride;
    const double cell_w = 800.0 / static_cast<double>(cols);
    const double cell_h = 320.0 / static_cast<double>(heatmap.modes);

    auto out = open_out(path);
    out << "<svg xmlns='http://www.w3.org/2000/svg' width='900' height='420'>\n";
    out << "<rect width='100%' height='100%' fill='white'/>\n";
    out << "<text x='450' y='24' text-anchor='middle' font-family='sans-serif' "
        << "font-size='16'>" << title << "</text>\n";
    for (int k = 1; k <= heatmap.modes; ++k) {
        for (std::size_t c = 0; c < cols; ++c) {
            double acc = 0.0;
            std::size_t cnt = 0;
            for (std::size_t i = c * stride; i < std::min(heatmap.samples, (c + 1) * stride);
                 ++i) {
                acc += heatmap.at(k, i);
                ++cnt;
            }
            const double v = cnt ? acc / static_cast<double>(cnt) : 0.0;
            const int gray = 255 - static_cast<int>(std::lround(std::clamp(v, 0.0, 1.0) * 255));
            out << "<rect x='" << 50 + cell_w * static_cast<double>(c) << "' y='"
                << 40 + cell_h * static_cast<double>(k - 1) << "' width='" << cell_w + 0.5
                << "' height='" << cell_h + 0.5 << "' fill='rgb(" << gray << ',' << gray << ','
                << gray << ")'/>\n";
        }
    }
    out << "</svg>\n";
}

}  // namespace qipf
