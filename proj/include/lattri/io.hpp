#pragma once

#include "lattri/experiments.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace lattri {

/// Flat key = value configuration. Lines starting with '#' are comments; keys are
/// [A-Za-z0-9_.-]+; values run to end of line with outer blanks trimmed.
class Config {
public:
    /// Throws ParseError naming the line.
    static Config parse(const std::string& text);
    std::string print() const;

    void set(const std::string& key, const std::string& value);
    bool has(const std::string& key) const { return kv_.count(key) != 0; }
    std::optional<std::string> get(const std::string& key) const;
    const std::map<std::string, std::string>& entries() const noexcept { return kv_; }

    // Typed getters throw ParseError naming the field.
    std::string str(const std::string& key, const std::string& def) const;
    double num(const std::string& key, double def) const;
    /// Accepts "1e7" style values when integral.
    std::int64_t integer(const std::string& key, std::int64_t def) const;
    std::uint64_t seed(const std::string& key, std::uint64_t def) const;

    bool operator==(const Config& o) const { return kv_ == o.kv_; }

private:
    std::map<std::string, std::string> kv_;
};

/// "x0,y0,x1,y1".
Edge parse_edge(const std::string& text);
/// Edges separated by ';'.
std::vector<Edge> parse_edge_list(const std::string& text);
/// "x,y" in lattice units; components may be half-integers such as "1.5".
Point parse_point(const std::string& text);
std::string format_point(Point p);

/// square:N, rect:WxH, strip:KxN (height K, width N), or a JSON object
/// {"polygon": [[x, y], ...], "constraints": [[[x, y], [x, y]], ...]}.
/// Extra constraints are appended to those in the region string.
BoundaryPtr parse_region(const std::string& spec, const std::vector<Edge>& extra = {});
/// Region from the fields `region` and `constraints`; a `region` value
/// starting with '@' names a file.
BoundaryPtr region_from_config(const Config& cfg);

/// One "x0 y0 x1 y1" line per midpoint in index order.
std::string write_triangulation(const Triangulation& s);
Triangulation read_triangulation(const BoundaryPtr& bc, const std::string& text);

struct Checkpoint {
    double lambda = 0.0;
    std::uint64_t seed = 0;
    std::uint64_t steps = 0;
    std::string engine;  // textual mt19937_64 state
    std::vector<Edge> edges;

    static Checkpoint of(const Chain& c);
    std::string to_text() const;
    static Checkpoint parse(const std::string& text);
    Chain restore(const BoundaryPtr& bc) const;
};

struct SvgStyle {
    bool classify = true;            // flippable blue, constraints black
    std::optional<Edge> highlight;   // ground edge g and the edges meeting it
    int scale = 40;
    int margin = 12;
};
std::string render_svg(const Triangulation& s, const SvgStyle& style = {});

std::string sha256_hex(const std::string& data);

std::string read_file(const std::string& path);
/// Throws IoError.
void write_file(const std::string& path, const std::string& data);

struct Artifact {
    std::string path;
    std::string sha256;
    std::uint64_t bytes = 0;
};

struct RunManifest {
    std::string command;
    Config config;
    std::vector<std::uint64_t> seeds;
    std::vector<Artifact> artifacts;
    double wall_seconds = 0.0;
    double steps_per_second = 0.0;

    void add_artifact(const std::string& path, const std::string& content);
    std::string to_json() const;
};

struct ExperimentOutput {
    std::string csv;
    Config summary;
};

/// Canonical ground edge at the free midpoint closest to the box centre.
Edge central_ground_edge(const GroundState& gs);

/// tail, crossings, verticals, coupling, ground-frequency, degree,
/// contraction, hitting, fkg-search. Throws UnknownExperiment.
ExperimentOutput run_experiment(const std::string& name, const Config& cfg);
const std::vector<std::string>& experiment_names();

/// ExperimentPlan fields from region, constraints, lambda, seed, replicas,
/// burn_in, interval, samples, threads.
ExperimentPlan plan_from_config(const Config& cfg);

} // namespace lattri
