#include "dani/cascade.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace dani {

namespace {

[[noreturn]] void fail(std::size_t line_no, const std::string& msg) {
    throw ParseError("line " + std::to_string(line_no) + ": " + msg);
}

double parse_time(const std::string& s, std::size_t line_no) {
    if (s == "inf" || s == "Inf" || s == "INF") return kInfiniteTime;
    try {
        std::size_t pos = 0;
        double t = std::stod(s, &pos);
        if (pos != s.size()) fail(line_no, "trailing characters in time '" + s + "'");
        if (t < 0) fail(line_no, "negative time " + s);
        return t;
    } catch (const std::invalid_argument&) {
        fail(line_no, "bad time value '" + s + "'");
    } catch (const std::out_of_range&) {
        fail(line_no, "time out of range '" + s + "'");
    }
}

NodeId parse_node(const std::string& s, std::size_t line_no) {
    NodeId id = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), id);
    if (ec != std::errc() || ptr != s.data() + s.size())
        fail(line_no, "bad node id '" + s + "'");
    return id;
}

Cascade parse_snap_cascade_line(const std::string& line, std::size_t line_no) {
    Cascade c;
    std::set<NodeId> seen;
    std::stringstream ss(line);
    std::string pair;
    while (std::getline(ss, pair, ';')) {
        auto comma = pair.find(',');
        if (comma == std::string::npos)
            fail(line_no, "expected 'node,time' in '" + pair + "'");
        NodeId node = parse_node(pair.substr(0, comma), line_no);
        double time = parse_time(pair.substr(comma + 1), line_no);
        if (!seen.insert(node).second)
            fail(line_no, "duplicate node " + std::to_string(node) + " in cascade");
        c.entries.push_back({node, time});
    }
    return c;
}

}  // namespace

CascadeVector to_cascade_vector(const Cascade& c) {
    std::vector<Cascade::Entry> finite;
    finite.reserve(c.entries.size());
    for (const auto& e : c.entries)
        if (std::isfinite(e.time)) finite.push_back(e);
    std::sort(finite.begin(), finite.end(), [](const auto& a, const auto& b) {
        if (a.time != b.time) return a.time < b.time;
        return a.node < b.node;  // tie-break for determinism
    });
    CascadeVector cv;
    cv.entries.reserve(finite.size());
    for (std::size_t i = 0; i < finite.size(); ++i)
        cv.entries.push_back({finite[i].node, static_cast<std::uint32_t>(i + 1)});
    return cv;
}

std::vector<CascadeVector> to_cascade_vectors(const CascadeSet& cs) {
    std::vector<CascadeVector> cvs;
    cvs.reserve(cs.cascades.size());
    for (const auto& c : cs.cascades) cvs.push_back(to_cascade_vector(c));
    return cvs;
}

CascadeStats cascade_stats(const CascadeSet& cs) {
    CascadeStats st;
    st.count = cs.cascades.size();
    st.node_count = cs.node_universe.size();
    std::size_t total = 0;
    for (const auto& c : cs.cascades) {
        std::size_t len = 0;
        for (const auto& e : c.entries)
            if (std::isfinite(e.time)) ++len;
        total += len;
        st.max_length = std::max(st.max_length, len);
    }
    st.mean_length = st.count ? static_cast<double>(total) / st.count : 0.0;
    return st;
}

void rebuild_node_universe(CascadeSet& cs) {
    std::set<NodeId> universe;
    for (const auto& c : cs.cascades)
        for (const auto& e : c.entries)
            if (std::isfinite(e.time)) universe.insert(e.node);
    cs.node_universe.assign(universe.begin(), universe.end());
}

CascadeSet parse_cascades_stream(std::istream& in, CascadeFormat format) {
    CascadeSet cs;
    std::string line;
    std::size_t line_no = 0;

    if (format == CascadeFormat::snap) {
        // Optional `<id>,<name>` node section, then a blank line, then one
        // cascade per line. Without a blank line the whole file is cascades.
        std::vector<std::pair<std::string, std::size_t>> lines;
        std::size_t blank_at = 0;
        bool has_blank = false;
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) {
                if (!has_blank) {
                    has_blank = true;
                    blank_at = lines.size();
                }
                continue;
            }
            lines.emplace_back(line, line_no);
        }
        std::size_t first_cascade = has_blank ? blank_at : 0;
        for (std::size_t i = first_cascade; i < lines.size(); ++i)
            cs.cascades.push_back(
                parse_snap_cascade_line(lines[i].first, lines[i].second));
    } else {
        // TSV: cascade_id <TAB> node <TAB> time. Records grouped by id in
        // first-appearance order.
        std::vector<std::string> ids;
        std::vector<Cascade> cascades;
        std::vector<std::set<NodeId>> seen;
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty() || line[0] == '#') continue;
            std::stringstream ss(line);
            std::string id, node_s, time_s;
            if (!std::getline(ss, id, '\t') || !std::getline(ss, node_s, '\t') ||
                !std::getline(ss, time_s, '\t'))
                fail(line_no, "expected cascade_id<TAB>node<TAB>time");
            NodeId node = parse_node(node_s, line_no);
            double time = parse_time(time_s, line_no);
            auto it = std::find(ids.begin(), ids.end(), id);
            std::size_t idx;
            if (it == ids.end()) {
                idx = ids.size();
                ids.push_back(id);
                cascades.emplace_back();
                seen.emplace_back();
            } else {
                idx = static_cast<std::size_t>(it - ids.begin());
            }
            if (!seen[idx].insert(node).second)
                fail(line_no, "duplicate node " + std::to_string(node) +
                                  " in cascade " + id);
            cascades[idx].entries.push_back({node, time});
        }
        cs.cascades = std::move(cascades);
    }

    rebuild_node_universe(cs);
    return cs;
}

CascadeSet parse_cascades(const std::string& path, CascadeFormat format) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    return parse_cascades_stream(in, format);
}

void write_cascades_stream(const CascadeSet& cs, std::ostream& out,
                           CascadeFormat format) {
    if (format == CascadeFormat::snap) {
        for (NodeId n : cs.node_universe) out << n << "," << n << "\n";
        out << "\n";
        for (const auto& c : cs.cascades) {
            bool first = true;
            for (const auto& e : c.entries) {
                if (!first) out << ";";
                out << e.node << ",";
                if (std::isfinite(e.time))
                    out << e.time;
                else
                    out << "inf";
                first = false;
            }
            out << "\n";
        }
    } else {
        for (std::size_t i = 0; i < cs.cascades.size(); ++i)
            for (const auto& e : cs.cascades[i].entries) {
                out << i << "\t" << e.node << "\t";
                if (std::isfinite(e.time))
                    out << e.time;
                else
                    out << "inf";
                out << "\n";
            }
    }
}

void write_cascades(const CascadeSet& cs, const std::string& path,
                    CascadeFormat format) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open " + path + " for writing");
    write_cascades_stream(cs, out, format);
}

}  // namespace dani
