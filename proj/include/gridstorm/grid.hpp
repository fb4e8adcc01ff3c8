#pragma once

#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace gridstorm {

enum class BusKind { generator, load, junction };

std::string_view to_string(BusKind kind);

struct Bus {
    int id = 0;
    BusKind kind = BusKind::junction;
    double nominal_demand = 0.0;

    bool operator==(const Bus&) const = default;
};

struct Generator {
    int bus = 0;
    double p_min = 0.0;
    double p_max = 0.0;
    double output = 0.0;
    // Reserve unit: only dispatched in islands that contain no regular generator.
    bool standby = false;

    bool operator==(const Generator&) const = default;
};

struct Branch {
    int id = 0;
    int from = 0;
    int to = 0;
    double reactance = 0.0;
    double capacity = 0.0;
    // Capacity column was '-': filled in from the base-case flow.
    bool capacity_from_base = false;
    bool alive = true;

    bool operator==(const Branch&) const = default;
};

class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Static network description. Buses are addressed either by id (as written in
/// case files) or by position (index into `buses()`), which is what the
/// numerical code uses.
class GridCase {
public:
    GridCase() = default;
    GridCase(std::string name, std::vector<Bus> buses, std::vector<Generator> generators,
             std::vector<Branch> branches);

    const std::string& name() const noexcept { return name_; }
    const std::vector<Bus>& buses() const noexcept { return buses_; }
    const std::vector<Generator>& generators() const noexcept { return generators_; }
    const std::vector<Branch>& branches() const noexcept { return branches_; }

    std::vector<Generator>& generators() noexcept { return generators_; }
    std::vector<Branch>& branches() noexcept { return branches_; }

    std::size_t bus_count() const noexcept { return buses_.size(); }
    std::size_t branch_count() const noexcept { return branches_.size(); }

    bool has_bus(int id) const { return bus_pos_.contains(id); }
    std::size_t bus_position(int id) const;
    std::size_t branch_position(int id) const;
    const Branch& branch(int id) const { return branches_[branch_position(id)]; }
    Branch& branch(int id) { return branches_[branch_position(id)]; }

    std::vector<std::size_t> load_positions() const;

    void set_nominal_demand(std::size_t pos, double demand);
    void kill_branch(int id) { branch(id).alive = false; }

    /// Throws ValidationError on the first violated invariant.
    void validate() const;

    bool operator==(const GridCase& other) const {
        return name_ == other.name_ && buses_ == other.buses_ &&
               generators_ == other.generators_ && branches_ == other.branches_;
    }

private:
    void reindex();

    std::string name_;
    std::vector<Bus> buses_;
    std::vector<Generator> generators_;
    std::vector<Branch> branches_;
    std::unordered_map<int, std::size_t> bus_pos_;
    std::unordered_map<int, std::size_t> branch_pos_;
};

GridCase parse_case(std::string_view source, std::string name = "case");
GridCase load_case_file(const std::string& path);
std::string serialize_case(const GridCase& grid);

struct MicrogridSpec {
    int microgrid_id = 0;
    int host_bus = 0;
    std::vector<int> member_buses;
    std::vector<int> tie_lines;
    GridCase internal_case;
};

struct ComposedGrid {
    GridCase main;
    std::vector<MicrogridSpec> microgrids;
    GridCase merged;

    const MicrogridSpec* microgrid_of_bus(int bus_id) const;
};

struct TieLineParameters {
    double reactance = 0.01;
    // Rating as a multiple of the attached microgrid's total nominal load.
    double capacity_factor = 1.5;
};

/// Attaches each case at its host bus. Microgrid bus ids are offset by
/// 100 * (attachment index + 1); generators of attached cases become standby
/// units so the main grid serves microgrid demand while connected.
ComposedGrid compose(const GridCase& main, const std::vector<std::pair<int, GridCase>>& attachments,
                     const TieLineParameters& tie = {});

/// Connected components over alive branches, as bus positions. Components are
/// ordered by their smallest position and each component is sorted.
std::vector<std::vector<std::size_t>> islands(const GridCase& grid);

/// Component label per bus position, consistent with islands().
std::vector<std::size_t> island_labels(const GridCase& grid);

}  // namespace gridstorm
