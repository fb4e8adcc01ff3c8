#include "gridstorm/grid.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace gridstorm {

std::string_view to_string(BusKind kind) {
    switch (kind) {
        case BusKind::generator: return "generator";
        case BusKind::load: return "load";
        case BusKind::junction: return "junction";
    }
    return "junction";
}

GridCase::GridCase(std::string name, std::vector<Bus> buses, std::vector<Generator> generators,
                   std::vector<Branch> branches)
    : name_(std::move(name)),
      buses_(std::move(buses)),
      generators_(std::move(generators)),
      branches_(std::move(branches)) {
    reindex();
}

void GridCase::reindex() {
    bus_pos_.clear();
    branch_pos_.clear();
    for (std::size_t i = 0; i < buses_.size(); ++i) bus_pos_.emplace(buses_[i].id, i);
    for (std::size_t i = 0; i < branches_.size(); ++i) branch_pos_.emplace(branches_[i].id, i);
}

std::size_t GridCase::bus_position(int id) const {
    auto it = bus_pos_.find(id);
    if (it == bus_pos_.end()) throw ValidationError("unknown bus id " + std::to_string(id));
    return it->second;
}

std::size_t GridCase::branch_position(int id) const {
    auto it = branch_pos_.find(id);
    if (it == branch_pos_.end()) throw ValidationError("unknown branch id " + std::to_string(id));
    return it->second;
}

std::vector<std::size_t> GridCase::load_positions() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < buses_.size(); ++i)
        if (buses_[i].kind == BusKind::load) out.push_back(i);
    return out;
}

void GridCase::set_nominal_demand(std::size_t pos, double demand) {
    if (buses_.at(pos).kind != BusKind::load && demand != 0.0)
        throw ValidationError("bus " + std::to_string(buses_[pos].id) + " is not a load");
    if (demand < 0.0) throw ValidationError("negative demand");
    buses_[pos].nominal_demand = demand;
}

void GridCase::validate() const {
    if (buses_.empty()) throw ValidationError(name_ + ": empty bus table");
    if (bus_pos_.size() != buses_.size()) throw ValidationError(name_ + ": duplicate bus id");
    if (branch_pos_.size() != branches_.size()) throw ValidationError(name_ + ": duplicate branch id");
    for (const auto& bus : buses_) {
        if (bus.nominal_demand < 0.0 || !std::isfinite(bus.nominal_demand))
            throw ValidationError("bus " + std::to_string(bus.id) + ": invalid demand");
        if (bus.kind != BusKind::load && bus.nominal_demand != 0.0)
            throw ValidationError("bus " + std::to_string(bus.id) + ": demand on a non-load bus");
    }
    bool any_load = false;
    for (const auto& bus : buses_) any_load |= bus.kind == BusKind::load;
    for (const auto& gen : generators_) {
        if (!has_bus(gen.bus))
            throw ValidationError("generator references missing bus " + std::to_string(gen.bus));
        if (buses_[bus_position(gen.bus)].kind != BusKind::generator)
            throw ValidationError("generator at bus " + std::to_string(gen.bus) +
                                  " which is not a generator bus");
        if (!(gen.p_min >= 0.0 && gen.p_min <= gen.p_max))
            throw ValidationError("generator at bus " + std::to_string(gen.bus) +
                                  ": need 0 <= p_min <= p_max");
    }
    if (any_load && generators_.empty()) throw ValidationError(name_ + ": loads but no generator");
    for (const auto& br : branches_) {
        const std::string tag = "branch " + std::to_string(br.id);
        if (!has_bus(br.from) || !has_bus(br.to))
            throw ValidationError(tag + ": dangling bus reference");
        if (br.from == br.to) throw ValidationError(tag + ": self loop");
        if (!(br.reactance > 0.0)) throw ValidationError(tag + ": reactance must be positive");
        if (!br.capacity_from_base && !(br.capacity > 0.0))
            throw ValidationError(tag + ": capacity must be positive");
    }
}

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        std::size_t j = i;
        while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
        if (j > i) out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

int to_int(std::string_view tok, std::size_t line) {
    int value = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc{} || ptr != tok.data() + tok.size())
        throw ParseError(line, "expected integer, got '" + std::string(tok) + "'");
    return value;
}

double to_double(std::string_view tok, std::size_t line) {
    // from_chars for double is not available in libstdc++ 11 for all targets.
    std::string s(tok);
    char* end = nullptr;
    const double value = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || s.empty() || !std::isfinite(value))
        throw ParseError(line, "expected number, got '" + s + "'");
    return value;
}

BusKind to_kind(std::string_view tok, std::size_t line) {
    if (tok == "generator") return BusKind::generator;
    if (tok == "load") return BusKind::load;
    if (tok == "junction") return BusKind::junction;
    throw ParseError(line, "unknown bus kind '" + std::string(tok) + "'");
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

GridCase parse_case(std::string_view source, std::string name) {
    enum class Section { none, bus, gen, branch } section = Section::none;
    std::vector<Bus> buses;
    std::vector<Generator> gens;
    std::vector<Branch> branches;

    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= source.size()) {
        std::size_t end = source.find('\n', start);
        if (end == std::string_view::npos) end = source.size();
        std::string_view line = source.substr(start, end - start);
        start = end + 1;
        ++line_no;

        auto toks = split_ws(line);
        if (toks.empty() || toks.front().front() == '#') continue;
        if (toks.size() == 1 && toks[0] == "BUS") { section = Section::bus; continue; }
        if (toks.size() == 1 && toks[0] == "GEN") { section = Section::gen; continue; }
        if (toks.size() == 1 && toks[0] == "BRANCH") { section = Section::branch; continue; }

        switch (section) {
            case Section::none:
                throw ParseError(line_no, "row outside of a BUS/GEN/BRANCH section");
            case Section::bus:
                if (toks.size() != 3) throw ParseError(line_no, "BUS row needs: id kind demand");
                buses.push_back({to_int(toks[0], line_no), to_kind(toks[1], line_no),
                                 to_double(toks[2], line_no)});
                break;
            case Section::gen:
                if (toks.size() != 3) throw ParseError(line_no, "GEN row needs: bus p_min p_max");
                gens.push_back({to_int(toks[0], line_no), to_double(toks[1], line_no),
                                to_double(toks[2], line_no)});
                break;
            case Section::branch: {
                if (toks.size() != 5)
                    throw ParseError(line_no, "BRANCH row needs: id from to reactance capacity");
                Branch br;
                br.id = to_int(toks[0], line_no);
                br.from = to_int(toks[1], line_no);
                br.to = to_int(toks[2], line_no);
                br.reactance = to_double(toks[3], line_no);
                if (toks[4] == "-") {
                    br.capacity_from_base = true;
                } else {
                    br.capacity = to_double(toks[4], line_no);
                }
                branches.push_back(br);
                break;
            }
        }
    }

    GridCase grid(std::move(name), std::move(buses), std::move(gens), std::move(branches));
    grid.validate();
    return grid;
}

GridCase load_case_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open case file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    std::string stem = path;
    if (auto slash = stem.find_last_of('/'); slash != std::string::npos) stem = stem.substr(slash + 1);
    if (auto dot = stem.find_last_of('.'); dot != std::string::npos) stem = stem.substr(0, dot);
    try {
        return parse_case(ss.str(), stem);
    } catch (const ParseError& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

std::string serialize_case(const GridCase& grid) {
    std::ostringstream out;
    out << "# " << grid.name() << "\nBUS\n";
    for (const auto& b : grid.buses())
        out << b.id << ' ' << to_string(b.kind) << ' ' << format_double(b.nominal_demand) << '\n';
    out << "GEN\n";
    for (const auto& g : grid.generators())
        out << g.bus << ' ' << format_double(g.p_min) << ' ' << format_double(g.p_max) << '\n';
    out << "BRANCH\n";
    for (const auto& br : grid.branches()) {
        out << br.id << ' ' << br.from << ' ' << br.to << ' ' << format_double(br.reactance) << ' ';
        if (br.capacity_from_base && br.capacity == 0.0)
            out << '-';
        else
            out << format_double(br.capacity);
        out << '\n';
    }
    return out.str();
}

const MicrogridSpec* ComposedGrid::microgrid_of_bus(int bus_id) const {
    for (const auto& mg : microgrids)
        if (std::find(mg.member_buses.begin(), mg.member_buses.end(), bus_id) != mg.member_buses.end())
            return &mg;
    return nullptr;
}

ComposedGrid compose(const GridCase& main, const std::vector<std::pair<int, GridCase>>& attachments,
                     const TieLineParameters& tie) {
    ComposedGrid out;
    out.main = main;

    std::vector<Bus> buses = main.buses();
    std::vector<Generator> gens = main.generators();
    std::vector<Branch> branches = main.branches();
    std::vector<MicrogridSpec> specs;

    for (std::size_t k = 0; k < attachments.size(); ++k) {
        const auto& [host, sub] = attachments[k];
        if (!main.has_bus(host))
            throw ValidationError("attachment host bus " + std::to_string(host) + " not in main grid");
        const int offset = 100 * static_cast<int>(k + 1);
        if (!sub.has_bus(1))
            throw ValidationError("attached case " + sub.name() + " has no bus 1");

        MicrogridSpec spec;
        spec.microgrid_id = static_cast<int>(k + 1);
        spec.host_bus = host;
        spec.internal_case = sub;

        double total_load = 0.0;
        for (const auto& b : sub.buses()) {
            Bus nb = b;
            nb.id += offset;
            buses.push_back(nb);
            spec.member_buses.push_back(nb.id);
            total_load += b.nominal_demand;
        }
        for (const auto& g : sub.generators()) {
            Generator ng = g;
            ng.bus += offset;
            ng.output = 0.0;
            ng.standby = true;
            gens.push_back(ng);
        }
        for (const auto& br : sub.branches()) {
            Branch nb = br;
            nb.id += offset;
            nb.from += offset;
            nb.to += offset;
            branches.push_back(nb);
        }
        Branch tie_line;
        tie_line.id = offset + 99;
        tie_line.from = host;
        tie_line.to = offset + 1;
        tie_line.reactance = tie.reactance;
        tie_line.capacity = tie.capacity_factor * total_load;
        if (!(tie_line.capacity > 0.0))
            throw ValidationError("attached case " + sub.name() + " has no load to size its tie line");
        branches.push_back(tie_line);
        spec.tie_lines.push_back(tie_line.id);
        specs.push_back(std::move(spec));
    }

    GridCase merged(main.name() + (attachments.empty() ? "" : "+microgrids"), std::move(buses),
                    std::move(gens), std::move(branches));
    try {
        merged.validate();
    } catch (const ValidationError& e) {
        throw ValidationError(std::string("id collision after offset: ") + e.what());
    }
    out.merged = std::move(merged);
    out.microgrids = std::move(specs);
    return out;
}

std::vector<std::size_t> island_labels(const GridCase& grid) {
    const std::size_t n = grid.bus_count();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (const auto& br : grid.branches()) {
        if (!br.alive) continue;
        auto a = find(grid.bus_position(br.from));
        auto b = find(grid.bus_position(br.to));
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
    // Relabel roots to dense component indices ordered by smallest member.
    std::vector<std::size_t> label(n), dense(n, n);
    std::size_t next = 0;
    for (std::size_t i = 0; i < n; ++i) {
        auto r = find(i);
        if (dense[r] == n) dense[r] = next++;
        label[i] = dense[r];
    }
    return label;
}

std::vector<std::vector<std::size_t>> islands(const GridCase& grid) {
    const auto label = island_labels(grid);
    std::size_t count = 0;
    for (auto l : label) count = std::max(count, l + 1);
    std::vector<std::vector<std::size_t>> out(count);
    for (std::size_t i = 0; i < label.size(); ++i) out[label[i]].push_back(i);
    return out;
}

}  // namespace gridstorm
