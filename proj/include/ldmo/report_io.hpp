#ifndef LDMO_REPORT_IO_HPP
#define LDMO_REPORT_IO_HPP

#include "engine.hpp"
#include "objective.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace ldmo {

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// %.17g: shortest format that always round-trips a double.
inline std::string format_real(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Writes `content` to `path.tmp` and renames it over `path`, so readers never
/// see a partially written file.
inline void write_atomically(const std::filesystem::path& path, const std::string& content)
{
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoError("cannot open " + tmp.string() + " for writing");
        }
        out << content;
        out.flush();
        if (!out) {
            throw IoError("write to " + tmp.string() + " failed");
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw IoError("cannot move " + tmp.string() + " to " + path.string());
    }
}

/// CSV with header "rep,pop,x1,...,xn,f"; rows ordered by (rep, pop, id) with
/// pop "LP" sorting before "P".
inline std::string format_csv(std::span<const RunReport> reports, std::size_t dim)
{
    std::string out = "rep,pop";
    for (std::size_t i = 1; i <= dim; ++i) {
        out += ",x" + std::to_string(i);
    }
    out += ",f\n";

    std::vector<const RunReport*> sorted;
    for (const RunReport& r : reports) {
        sorted.push_back(&r);
    }
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const RunReport* a, const RunReport* b) { return a->repetition < b->repetition; });

    auto rows = [&](const RunReport& r, const char* tag, std::vector<Solution> pop) {
        std::sort(pop.begin(), pop.end(), [](const Solution& a, const Solution& b) { return a.id < b.id; });
        for (const Solution& s : pop) {
            out += std::to_string(r.repetition);
            out += ',';
            out += tag;
            for (double x : s.point) {
                out += ',';
                out += format_real(x);
            }
            out += ',';
            out += format_real(s.value);
            out += '\n';
        }
    };
    for (const RunReport* r : sorted) {
        rows(*r, "LP", r->final_archive);
        rows(*r, "P", r->final_population);
    }
    return out;
}

inline void write_csv(std::span<const RunReport> reports, std::size_t dim,
                      const std::filesystem::path& path)
{
    if (reports.empty()) {
        throw std::invalid_argument("write_csv: no reports");
    }
    write_atomically(path, format_csv(reports, dim));
}

/// Run parameters echoed into summary.json.
struct SummaryHeader {
    std::string function;
    std::size_t dim = 0;
    std::size_t m = 0;
    double sigma = 0.0;
    std::size_t iterations = 0;
    std::size_t repetitions = 0;
    std::uint64_t seed = 0;
    Bounds bounds;
};

inline nlohmann::ordered_json summary_json(std::span<const RunReport> reports, const SummaryHeader& h)
{
    using nlohmann::ordered_json;
    ordered_json j;
    j["function"] = h.function;
    j["dim"] = h.dim;
    j["m"] = h.m;
    j["sigma"] = h.sigma;
    j["iterations"] = h.iterations;
    j["repetitions"] = h.repetitions;
    j["seed"] = h.seed;
    j["bounds"] = {{"lower", h.bounds.lower}, {"upper", h.bounds.upper}};

    ordered_json per_rep = ordered_json::array();
    std::vector<std::size_t> counts;
    std::size_t global_hits = 0;
    for (const RunReport& r : reports) {
        per_rep.push_back({
            {"rep", r.repetition},
            {"seed", r.seed},
            {"distinct_optima", r.distinct_optima},
            {"global_found", r.global_found},
            {"eval_count", r.eval_count},
            {"lp_size", r.final_archive.size()},
            {"p_size", r.final_population.size()},
        });
        counts.push_back(r.distinct_optima);
        global_hits += r.global_found ? 1 : 0;
    }
    j["per_rep"] = std::move(per_rep);

    std::sort(counts.begin(), counts.end());
    ordered_json agg;
    if (!counts.empty()) {
        const std::size_t n = counts.size();
        const double median = n % 2 == 1
            ? static_cast<double>(counts[n / 2])
            : 0.5 * static_cast<double>(counts[n / 2 - 1] + counts[n / 2]);
        agg["min_distinct_optima"] = counts.front();
        agg["median_distinct_optima"] = median;
        agg["max_distinct_optima"] = counts.back();
        agg["fraction_global_found"] = static_cast<double>(global_hits) / static_cast<double>(n);
    }
    j["aggregate"] = std::move(agg);
    return j;
}

inline void write_json_summary(std::span<const RunReport> reports, const SummaryHeader& header,
                               const std::filesystem::path& path)
{
    if (reports.empty()) {
        throw std::invalid_argument("write_json_summary: no reports");
    }
    write_atomically(path, summary_json(reports, header).dump(2) + "\n");
}

namespace detail {

inline std::string xml_escape(std::string_view s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

inline std::string fmt(const char* f, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

} // namespace detail

/// Standalone SVG of a 2-D run: grayscale heatmap of f sampled on a
/// grid x grid lattice (dark = low), LP members as filled circles and P
/// members as hollow circles. Sampling uses a private copy of the objective.
inline std::string render_svg(const RunReport& report, const ObjectiveSpec& spec, std::size_t grid = 200)
{
    if (spec.dim() != 2) {
        throw ContractViolation("render_svg: only 2-D objectives can be plotted");
    }
    if (grid < 16) {
        throw ContractViolation("render_svg: grid must be >= 16");
    }
    const ObjectiveSpec f = spec;
    const Bounds& b = spec.bounds();
    constexpr double margin = 60.0;
    constexpr double side = 520.0;
    const double cell = side / static_cast<double>(grid);

    // Row r is drawn top-down, so it samples the upper end of the y range first.
    std::vector<double> values(grid * grid);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    Point p(2);
    for (std::size_t r = 0; r < grid; ++r) {
        p[1] = b.upper[1] - (static_cast<double>(r) + 0.5) / static_cast<double>(grid) * (b.upper[1] - b.lower[1]);
        for (std::size_t c = 0; c < grid; ++c) {
            p[0] = b.lower[0] + (static_cast<double>(c) + 0.5) / static_cast<double>(grid) * (b.upper[0] - b.lower[0]);
            const double v = f.evaluate(p);
            values[r * grid + c] = v;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    const double span = hi > lo ? hi - lo : 1.0;

    std::ostringstream os;
    const double total = side + 2.0 * margin;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << total << "\" height=\"" << total
       << "\" viewBox=\"0 0 " << total << ' ' << total << "\">\n";
    os << "<rect x=\"0\" y=\"0\" width=\"" << total << "\" height=\"" << total << "\" fill=\"white\"/>\n";
    os << "<g shape-rendering=\"crispEdges\">\n";
    for (std::size_t r = 0; r < grid; ++r) {
        std::size_t c = 0;
        while (c < grid) {
            const int level = static_cast<int>(std::lround(255.0 * (values[r * grid + c] - lo) / span));
            std::size_t run = 1;
            while (c + run < grid &&
                   static_cast<int>(std::lround(255.0 * (values[r * grid + c + run] - lo) / span)) == level) {
                ++run;
            }
            os << "<rect x=\"" << detail::fmt("%.3f", margin + cell * static_cast<double>(c))
               << "\" y=\"" << detail::fmt("%.3f", margin + cell * static_cast<double>(r))
               << "\" width=\"" << detail::fmt("%.3f", cell * static_cast<double>(run) + 0.01)
               << "\" height=\"" << detail::fmt("%.3f", cell + 0.01)
               << "\" fill=\"rgb(" << level << ',' << level << ',' << level << ")\"/>\n";
            c += run;
        }
    }
    os << "</g>\n";

    auto to_px = [&](const Point& q) {
        const double x = margin + (q[0] - b.lower[0]) / (b.upper[0] - b.lower[0]) * side;
        const double y = margin + (b.upper[1] - q[1]) / (b.upper[1] - b.lower[1]) * side;
        return std::pair{x, y};
    };
    os << "<g id=\"archive\">\n";
    for (const Solution& s : report.final_archive) {
        const auto [x, y] = to_px(s.point);
        os << "<circle cx=\"" << detail::fmt("%.3f", x) << "\" cy=\"" << detail::fmt("%.3f", y)
           << "\" r=\"4\" fill=\"rgb(220,30,30)\" stroke=\"black\" stroke-width=\"0.5\"/>\n";
    }
    os << "</g>\n<g id=\"population\">\n";
    for (const Solution& s : report.final_population) {
        const auto [x, y] = to_px(s.point);
        os << "<circle cx=\"" << detail::fmt("%.3f", x) << "\" cy=\"" << detail::fmt("%.3f", y)
           << "\" r=\"4\" fill=\"none\" stroke=\"rgb(30,90,230)\" stroke-width=\"1.5\"/>\n";
    }
    os << "</g>\n";

    os << "<rect x=\"" << margin << "\" y=\"" << margin << "\" width=\"" << side << "\" height=\"" << side
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    os << "<g font-family=\"sans-serif\" font-size=\"13\">\n";
    const double bottom = margin + side;
    os << "<text x=\"" << margin << "\" y=\"" << bottom + 20 << "\" text-anchor=\"middle\">"
       << detail::fmt("%g", b.lower[0]) << "</text>\n";
    os << "<text x=\"" << bottom << "\" y=\"" << bottom + 20 << "\" text-anchor=\"middle\">"
       << detail::fmt("%g", b.upper[0]) << "</text>\n";
    os << "<text x=\"" << margin - 8 << "\" y=\"" << bottom + 4 << "\" text-anchor=\"end\">"
       << detail::fmt("%g", b.lower[1]) << "</text>\n";
    os << "<text x=\"" << margin - 8 << "\" y=\"" << margin + 4 << "\" text-anchor=\"end\">"
       << detail::fmt("%g", b.upper[1]) << "</text>\n";
    os << "<text x=\"" << margin + side / 2 << "\" y=\"" << bottom + 40 << "\" text-anchor=\"middle\">x1</text>\n";
    os << "<text x=\"" << margin - 30 << "\" y=\"" << margin + side / 2 << "\" text-anchor=\"middle\">x2</text>\n";
    os << "<text x=\"" << margin + side / 2 << "\" y=\"" << margin - 20 << "\" text-anchor=\"middle\">"
       << detail::xml_escape(spec.name()) << ", repetition " << report.repetition << ": "
       << report.final_archive.size() << " archived (filled), " << report.final_population.size()
       << " active (hollow)</text>\n";
    os << "</g>\n</svg>\n";
    return os.str();
}

/// Writes render_svg output to `path`. Returns false (and writes nothing) when
/// the objective is not 2-D.
inline bool emit_plot(const RunReport& report, const ObjectiveSpec& spec,
                      const std::filesystem::path& path, std::size_t grid = 200)
{
    if (spec.dim() != 2) {
        return false;
    }
    write_atomically(path, render_svg(report, spec, grid));
    return true;
}

} // namespace ldmo

#endif
