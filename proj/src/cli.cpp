#include "ruinlab/cli.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ruinlab/diffusion.hpp"
#include "ruinlab/markov.hpp"
#include "ruinlab/numerics.hpp"

namespace ruinlab::cli {

namespace {

[[noreturn]] void fail(const char* code, std::string message) {
    throw ConfigError{code, std::move(message)};
}

std::string trim(const std::string& s) {
    const std::size_t first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) {
        return {};
    }
    const std::size_t last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split_tokens(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string token;
    while (in >> token) {
        out.push_back(token);
    }
    return out;
}

double to_double(const std::string& token, const std::string& where) {
    double value = 0.0;
    const char* begin = token.data();
    const char* end = begin + token.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end) {
        fail("bad-value", where + ": cannot parse '" + token + "' as a number");
    }
    return value;
}

long long to_integer(const std::string& token, const std::string& where) {
    long long value = 0;
    const char* begin = token.data();
    const char* end = begin + token.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end) {
        fail("bad-value", where + ": cannot parse '" + token + "' as an integer");
    }
    return value;
}

std::uint64_t to_u64(const std::string& token, const std::string& where) {
    std::uint64_t value = 0;
    const char* begin = token.data();
    const char* end = begin + token.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end) {
        fail("bad-value",
             where + ": cannot parse '" + token + "' as a nonnegative integer");
    }
    return value;
}

// Raw key/value soup of one INI document: section -> key -> value. Keys are
// erased as the builders consume them so leftovers can be reported.
using Soup = std::map<std::string, std::map<std::string, std::string>>;

const char* const kKnownSections[] = {"environment", "components", "claims",
                                      "query",       "mc",         "quadrature",
                                      "experiment"};

bool known_section(const std::string& name) {
    for (const char* s : kKnownSections) {
        if (name == s) {
            return true;
        }
    }
    return false;
}

Soup read_soup(std::istream& in) {
    Soup soup;
    std::string line;
    std::string section;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        const std::size_t comment = line.find_first_of("#;");
        if (comment != std::string::npos) {
            line.erase(comment);
        }
        const std::string text = trim(line);
        if (text.empty()) {
            continue;
        }
        if (text.front() == '[') {
            if (text.back() != ']') {
                fail("syntax", "line " + std::to_string(number) +
                                   ": unterminated section header");
            }
            section = trim(text.substr(1, text.size() - 2));
            if (!known_section(section)) {
                fail("unknown-section", "line " + std::to_string(number) +
                                            ": unknown section [" + section + "]");
            }
            soup[section];
            continue;
        }
        const std::size_t eq = text.find('=');
        if (eq == std::string::npos) {
            fail("syntax", "line " + std::to_string(number) +
                               ": expected 'key = value' or a section header");
        }
        if (section.empty()) {
            fail("syntax", "line " + std::to_string(number) +
                               ": key before any section header");
        }
        const std::string key = trim(text.substr(0, eq));
        if (key.empty()) {
            fail("syntax", "line " + std::to_string(number) + ": empty key");
        }
        const std::string value = trim(text.substr(eq + 1));
        if (!soup[section].emplace(key, value).second) {
            fail("duplicate-key", "line " + std::to_string(number) +
                                      ": duplicate key '" + key + "' in [" +
                                      section + "]");
        }
    }
    return soup;
}

std::optional<std::string> take(Soup& soup, const std::string& section,
                                const std::string& key) {
    const auto sec = soup.find(section);
    if (sec == soup.end()) {
        return std::nullopt;
    }
    const auto it = sec->second.find(key);
    if (it == sec->second.end()) {
        return std::nullopt;
    }
    std::string value = it->second;
    sec->second.erase(it);
    return value;
}

std::string require(Soup& soup, const std::string& section,
                    const std::string& key) {
    std::optional<std::string> value = take(soup, section, key);
    if (!value) {
        fail("missing-key", "[" + section + "] needs key '" + key + "'");
    }
    return *value;
}

std::vector<double> double_list(const std::string& value,
                                const std::string& where) {
    std::vector<double> out;
    for (const std::string& token : split_tokens(value)) {
        out.push_back(to_double(token, where));
    }
    if (out.empty()) {
        fail("bad-value", where + ": needs at least one number");
    }
    return out;
}

model::ClaimDistribution parse_claim(const std::string& value,
                                     const std::string& where) {
    const std::vector<std::string> tokens = split_tokens(value);
    if (tokens.empty()) {
        fail("bad-value", where + ": empty distribution");
    }
    const std::string& family = tokens.front();
    if (family == "exponential") {
        if (tokens.size() != 2) {
            fail("bad-value", where + ": exponential takes exactly one "
                                      "parameter, the mean");
        }
        return model::ClaimDistribution::exponential(to_double(tokens[1], where));
    }
    if (family == "gamma") {
        if (tokens.size() != 3) {
            fail("bad-value",
                 where + ": gamma takes exactly two parameters, shape and scale");
        }
        return model::ClaimDistribution::gamma(to_double(tokens[1], where),
                                               to_double(tokens[2], where));
    }
    if (family == "deterministic") {
        if (tokens.size() != 2) {
            fail("bad-value", where + ": deterministic takes exactly one "
                                      "parameter, the value");
        }
        return model::ClaimDistribution::deterministic(
            to_double(tokens[1], where));
    }
    fail("bad-value", where + ": unknown distribution family '" + family +
                          "' (use exponential, gamma, or deterministic)");
}

void parse_mode(const std::string& value, model::RuinQuery& query) {
    if (value == "all") {
        query.mode = model::RuinQuery::Mode::AllComponents;
        return;
    }
    if (value == "any") {
        query.mode = model::RuinQuery::Mode::AnyComponent;
        return;
    }
    if (value.rfind("marginal:", 0) == 0) {
        query.mode = model::RuinQuery::Mode::Marginal;
        const long long index =
            to_integer(value.substr(9), "[query] mode marginal index");
        if (index < 1) {
            fail("bad-value", "[query] mode: component indices are 1-based");
        }
        query.marginal = static_cast<int>(index - 1);
        return;
    }
    if (value.rfind("subset:", 0) == 0) {
        query.mode = model::RuinQuery::Mode::Subset;
        query.subset.clear();
        std::string rest = value.substr(7);
        std::size_t pos = 0;
        while (pos <= rest.size()) {
            const std::size_t comma = rest.find(',', pos);
            const std::string token =
                trim(rest.substr(pos, comma == std::string::npos
                                          ? std::string::npos
                                          : comma - pos));
            const long long index = to_integer(token, "[query] mode subset index");
            if (index < 1) {
                fail("bad-value", "[query] mode: component indices are 1-based");
            }
            query.subset.push_back(static_cast<int>(index - 1));
            if (comma == std::string::npos) {
                break;
            }
            pos = comma + 1;
        }
        if (query.subset.empty()) {
            fail("bad-value", "[query] mode: subset needs at least one index");
        }
        return;
    }
    fail("bad-value", "[query] mode: expected all, any, marginal:i, or "
                      "subset:i,j,... got '" +
                          value + "'");
}

const char* const kKnownMethods[] = {"mc", "diffusion", "single-switch",
                                     "independence"};

bool known_method(const std::string& name) {
    for (const char* m : kKnownMethods) {
        if (name == m) {
            return true;
        }
    }
    return false;
}

void leftover_check(const Soup& soup) {
    for (const auto& [section, entries] : soup) {
        if (!entries.empty()) {
            fail("unknown-key", "unknown key '" + entries.begin()->first +
                                    "' in [" + section + "]");
        }
    }
}

std::string render_mode(const model::RuinQuery& query) {
    switch (query.mode) {
        case model::RuinQuery::Mode::AllComponents:
            return "all";
        case model::RuinQuery::Mode::AnyComponent:
            return "any";
        case model::RuinQuery::Mode::Marginal:
            return "marginal:" + std::to_string(query.marginal + 1);
        case model::RuinQuery::Mode::Subset:
            break;
    }
    std::string out = "subset:";
    for (std::size_t i = 0; i < query.subset.size(); ++i) {
        if (i > 0) {
            out += ',';
        }
        out += std::to_string(query.subset[i] + 1);
    }
    return out;
}

std::string format_number(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof buffer, "%.17g", value);
    return buffer;
}

std::string csv_field(const std::string& raw) {
    if (raw.find_first_of(",\"\n") == std::string::npos) {
        return raw;
    }
    std::string out = "\"";
    for (char c : raw) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    out += '"';
    return out;
}

}  // namespace

ExperimentConfig parse_config(std::istream& in) {
    Soup soup = read_soup(in);
    ExperimentConfig config;

    // [environment]
    const long long states =
        to_integer(require(soup, "environment", "states"), "[environment] states");
    if (states < 1 || states > 64) {
        fail("bad-value", "[environment] states: needs 1 to 64 states");
    }
    model::EnvironmentModel& env = config.model.environment;
    env.states = static_cast<int>(states);
    env.rates.assign(static_cast<std::size_t>(states * states), 0.0);
    for (int i = 0; i < env.states; ++i) {
        const std::string key = "q_row_" + std::to_string(i + 1);
        const std::string where = "[environment] " + key;
        const std::vector<double> row =
            double_list(require(soup, "environment", key), where);
        if (row.size() != static_cast<std::size_t>(env.states)) {
            fail("bad-value", where + ": needs exactly " +
                                  std::to_string(env.states) + " entries");
        }
        for (int j = 0; j < env.states; ++j) {
            env.rates[i * env.states + j] = row[j];
        }
    }

    // [components]
    const long long count =
        to_integer(require(soup, "components", "count"), "[components] count");
    if (count < 1 || count > 64) {
        fail("bad-value", "[components] count: needs 1 to 64 components");
    }
    config.model.components = static_cast<int>(count);
    config.model.premiums =
        double_list(require(soup, "components", "premiums"), "[components] premiums");
    if (config.model.premiums.size() != static_cast<std::size_t>(count)) {
        fail("bad-value", "[components] premiums: needs exactly " +
                              std::to_string(count) + " entries");
    }
    config.model.arrival_rates.assign(
        static_cast<std::size_t>(count * states), 0.0);
    for (int i = 0; i < config.model.components; ++i) {
        const std::string key = "lambda_" + std::to_string(i + 1);
        const std::string where = "[components] " + key;
        const std::vector<double> row =
            double_list(require(soup, "components", key), where);
        if (row.size() != static_cast<std::size_t>(env.states)) {
            fail("bad-value", where + ": needs exactly " +
                                  std::to_string(env.states) + " entries");
        }
        for (int j = 0; j < env.states; ++j) {
            config.model.arrival_rates[i * env.states + j] = row[j];
        }
    }

    // [claims]
    config.model.claims.assign(static_cast<std::size_t>(count * states), {});
    for (int i = 0; i < config.model.components; ++i) {
        for (int j = 0; j < env.states; ++j) {
            const std::string key =
                "dist_" + std::to_string(i + 1) + "_" + std::to_string(j + 1);
            const std::string where = "[claims] " + key;
            config.model.claims[i * env.states + j] =
                parse_claim(require(soup, "claims", key), where);
        }
    }

    // [query]
    config.query.initial_capital =
        double_list(require(soup, "query", "u"), "[query] u");
    config.query.horizon = to_double(require(soup, "query", "T"), "[query] T");
    if (std::optional<std::string> state = take(soup, "query", "initial_state")) {
        if (*state == "stationary") {
            config.query.initial_state = -1;
        } else {
            const long long index = to_integer(*state, "[query] initial_state");
            if (index < 1) {
                fail("bad-value",
                     "[query] initial_state: states are 1-based (or "
                     "'stationary')");
            }
            config.query.initial_state = static_cast<int>(index - 1);
        }
    } else {
        config.query.initial_state = -1;
    }
    if (std::optional<std::string> mode = take(soup, "query", "mode")) {
        parse_mode(*mode, config.query);
    }

    // [mc]
    config.mc.paths = 1000000;
    if (std::optional<std::string> v = take(soup, "mc", "paths")) {
        config.mc.paths = to_u64(*v, "[mc] paths");
        if (config.mc.paths == 0) {
            fail("bad-value", "[mc] paths: needs at least one path");
        }
    }
    if (std::optional<std::string> v = take(soup, "mc", "seed")) {
        config.mc.seed = to_u64(*v, "[mc] seed");
    }
    if (std::optional<std::string> v = take(soup, "mc", "confidence")) {
        config.mc.confidence = to_double(*v, "[mc] confidence");
        if (!(config.mc.confidence > 0.0) || !(config.mc.confidence < 1.0)) {
            fail("bad-value", "[mc] confidence: needs a level in (0, 1)");
        }
    }
    if (std::optional<std::string> v = take(soup, "mc", "threads")) {
        const long long threads = to_integer(*v, "[mc] threads");
        if (threads < 0) {
            fail("bad-value", "[mc] threads: needs a nonnegative count");
        }
        config.mc.threads = static_cast<int>(threads);
    }

    // [quadrature]
    if (std::optional<std::string> v = take(soup, "quadrature", "rel_tol")) {
        config.quadrature.rel_tol = to_double(*v, "[quadrature] rel_tol");
        if (!(config.quadrature.rel_tol > 0.0)) {
            fail("bad-value", "[quadrature] rel_tol: needs a positive tolerance");
        }
    }
    if (std::optional<std::string> v = take(soup, "quadrature", "abs_tol")) {
        config.quadrature.abs_tol = to_double(*v, "[quadrature] abs_tol");
        if (!(config.quadrature.abs_tol > 0.0)) {
            fail("bad-value", "[quadrature] abs_tol: needs a positive tolerance");
        }
    }
    if (std::optional<std::string> v =
            take(soup, "quadrature", "max_subdivisions")) {
        const long long subdivisions =
            to_integer(*v, "[quadrature] max_subdivisions");
        if (subdivisions < 1) {
            fail("bad-value",
                 "[quadrature] max_subdivisions: needs a positive count");
        }
        config.quadrature.max_subdivisions = static_cast<int>(subdivisions);
    }

    // [experiment]
    if (std::optional<std::string> v = take(soup, "experiment", "T_grid")) {
        config.horizons = double_list(*v, "[experiment] T_grid");
        for (std::size_t k = 0; k < config.horizons.size(); ++k) {
            if (!(config.horizons[k] > 0.0)) {
                fail("bad-value", "[experiment] T_grid: horizons must be positive");
            }
            if (k > 0 && !(config.horizons[k] > config.horizons[k - 1])) {
                fail("bad-value",
                     "[experiment] T_grid: horizons must be strictly increasing");
            }
        }
    }
    if (std::optional<std::string> v = take(soup, "experiment", "methods")) {
        config.methods = split_tokens(*v);
        if (config.methods.empty()) {
            fail("bad-value", "[experiment] methods: needs at least one method");
        }
        for (std::size_t a = 0; a < config.methods.size(); ++a) {
            if (!known_method(config.methods[a])) {
                fail("bad-value", "[experiment] methods: unknown method '" +
                                      config.methods[a] +
                                      "' (use mc, diffusion, single-switch, "
                                      "independence)");
            }
            for (std::size_t b = a + 1; b < config.methods.size(); ++b) {
                if (config.methods[a] == config.methods[b]) {
                    fail("bad-value", "[experiment] methods: '" +
                                          config.methods[a] + "' listed twice");
                }
            }
        }
    } else {
        config.methods = {"mc", "diffusion", "single-switch", "independence"};
    }
    if (std::optional<std::string> v = take(soup, "experiment", "output")) {
        config.output = *v;
    }

    leftover_check(soup);

    const std::vector<model::Violation> violations =
        model::validate(config.model, config.query);
    if (!violations.empty()) {
        throw ConfigError{violations.front().code, violations.front().message};
    }
    return config;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        fail("io", "cannot open configuration file: " + path);
    }
    return parse_config(in);
}

std::vector<ResultRow> run(const ExperimentConfig& config) {
    const std::vector<double> grid = config.horizons.empty()
                                         ? std::vector<double>{config.query.horizon}
                                         : config.horizons;
    bool want_mc = false;
    bool want_diffusion = false;
    bool want_switch = false;
    bool want_independence = false;
    for (const std::string& method : config.methods) {
        if (method == "mc") {
            want_mc = true;
        } else if (method == "diffusion") {
            want_diffusion = true;
        } else if (method == "single-switch") {
            want_switch = true;
        } else if (method == "independence") {
            want_independence = true;
        } else {
            throw std::invalid_argument("run: unknown method '" + method + "'");
        }
    }

    std::vector<ResultRow> rows(grid.size());
    const int state_echo =
        config.query.initial_state < 0 ? 0 : config.query.initial_state + 1;
    const std::string mode_echo = render_mode(config.query);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        rows[k].horizon = grid[k];
        rows[k].state = state_echo;
        rows[k].mode = mode_echo;
    }

    if (want_mc) {
        double largest = grid.front();
        for (double h : grid) {
            largest = std::max(largest, h);
        }
        try {
            const std::vector<simulate::MonteCarloEstimate> estimates =
                simulate::estimate_ruin_grid(config.model, config.query, grid,
                                             config.mc);
            for (std::size_t k = 0; k < grid.size(); ++k) {
                rows[k].mc = estimates[k].estimate;
                rows[k].mc_ci_low = estimates[k].ci_low;
                rows[k].mc_ci_high = estimates[k].ci_high;
            }
        } catch (const std::exception& e) {
            throw EstimatorError{"mc", largest, e.what()};
        }
    }

    for (std::size_t k = 0; k < grid.size(); ++k) {
        model::RuinQuery query = config.query;
        query.horizon = grid[k];
        if (want_diffusion) {
            try {
                rows[k].diffusion =
                    diffusion::multivariate_ruin_diffusion(config.model, query)
                        .value;
            } catch (const std::exception& e) {
                throw EstimatorError{"diffusion", grid[k], e.what()};
            }
        }
        if (want_switch) {
            try {
                rows[k].single_switch =
                    switching::chi(config.model, query, config.quadrature);
            } catch (const std::exception& e) {
                throw EstimatorError{"single-switch", grid[k], e.what()};
            }
        }
        if (want_independence) {
            try {
                rows[k].independence =
                    diffusion::independence_ruin(config.model, query);
            } catch (const std::exception& e) {
                throw EstimatorError{"independence", grid[k], e.what()};
            }
        }
    }
    return rows;
}

void write_csv(const std::vector<ResultRow>& rows, std::ostream& out) {
    out << "T,mc,mc_ci_low,mc_ci_high,diffusion,single_switch,independence,"
           "state,mode\n";
    auto cell = [](const std::optional<double>& value) {
        return value ? format_number(*value) : std::string();
    };
    for (const ResultRow& row : rows) {
        out << format_number(row.horizon) << ',' << cell(row.mc) << ','
            << cell(row.mc_ci_low) << ',' << cell(row.mc_ci_high) << ','
            << cell(row.diffusion) << ',' << cell(row.single_switch) << ','
            << cell(row.independence) << ',' << row.state << ','
            << csv_field(row.mode) << '\n';
    }
}

namespace {

const std::string kExample1 = R"cfg(# Baseline book: two lines of business on a two-state environment with
# unit-mean exponential claims. Arrivals swing between a calm regime and a
# stressed regime; switching and claim arrivals run on comparable clocks.
[environment]
states = 2
q_row_1 = -1 1
q_row_2 = 2 -2

[components]
count = 2
premiums = 1 1
lambda_1 = 0.45 1.8
lambda_2 = 0.45 1.8

[claims]
dist_1_1 = exponential 1
dist_1_2 = exponential 1
dist_2_1 = exponential 1
dist_2_2 = exponential 1

[query]
u = 10 10
T = 50
initial_state = 1
mode = all

[mc]
paths = 200000
seed = 20260816
confidence = 0.95
threads = 0

[quadrature]
rel_tol = 1e-6
abs_tol = 1e-10
max_subdivisions = 200

[experiment]
T_grid = 2 4 6 8 10 12 14 16 18 20 22 24 26 28 30 32 34 36 38 40 42 44 46 48 50
methods = mc diffusion single-switch independence
)cfg";

const std::string kExample2 = R"cfg(# Slow-environment variant of the baseline book: the switching rates are
# divided by 64, so regime sojourns dwarf the claim interarrival times.
# Long sojourns favor the single-switch approximation.
[environment]
states = 2
q_row_1 = -0.015625 0.015625
q_row_2 = 0.03125 -0.03125

[components]
count = 2
premiums = 1 1
lambda_1 = 0.45 1.8
lambda_2 = 0.45 1.8

[claims]
dist_1_1 = exponential 1
dist_1_2 = exponential 1
dist_2_1 = exponential 1
dist_2_2 = exponential 1

[query]
u = 10 10
T = 50
initial_state = 1
mode = all

[mc]
paths = 200000
seed = 20260816
confidence = 0.95
threads = 0

[quadrature]
rel_tol = 1e-6
abs_tol = 1e-10
max_subdivisions = 200

[experiment]
T_grid = 2 4 6 8 10 12 14 16 18 20 22 24 26 28 30 32 34 36 38 40 42 44 46 48 50
methods = mc diffusion single-switch independence
)cfg";

const std::string kExample3 = R"cfg(# Sparse-arrivals variant of the baseline book: both intensities scaled to
# 0.8 of their baseline values while the environment keeps its pace. Fewer
# claims per unit time weaken the diffusion approximation.
[environment]
states = 2
q_row_1 = -1 1
q_row_2 = 2 -2

[components]
count = 2
premiums = 1 1
lambda_1 = 0.36 1.44
lambda_2 = 0.36 1.44

[claims]
dist_1_1 = exponential 1
dist_1_2 = exponential 1
dist_2_1 = exponential 1
dist_2_2 = exponential 1

[query]
u = 10 10
T = 50
initial_state = 1
mode = all

[mc]
paths = 200000
seed = 20260816
confidence = 0.95
threads = 0

[quadrature]
rel_tol = 1e-6
abs_tol = 1e-10
max_subdivisions = 200

[experiment]
T_grid = 2 4 6 8 10 12 14 16 18 20 22 24 26 28 30 32 34 36 38 40 42 44 46 48 50
methods = mc diffusion single-switch independence
)cfg";

}  // namespace

const std::string& builtin_example_config(int index) {
    switch (index) {
        case 1:
            return kExample1;
        case 2:
            return kExample2;
        case 3:
            return kExample3;
        default:
            break;
    }
    throw std::invalid_argument(
        "builtin_example_config: index must be 1, 2, or 3");
}

namespace {

double draw_claim_size(const model::ClaimDistribution& dist,
                       numerics::RngStream& rng) {
    switch (dist.kind) {
        case model::ClaimDistribution::Kind::Exponential:
            return rng.next_exponential(dist.p1);
        case model::ClaimDistribution::Kind::Gamma:
            return rng.next_gamma(dist.p1, dist.p2);
        case model::ClaimDistribution::Kind::Deterministic:
            break;
    }
    return dist.p1;
}

// Empirical covariance of the centered, sqrt(scale)-normalized claim flow
// at one time point, against the limit matrix the diffusion approximation
// uses. A direct check that the covariance matching is the right one.
int run_fclt_check(const ExperimentConfig& config, long long scale,
                   double at_time, std::ostream& out) {
    const model::RiskModel& m = config.model;
    const std::vector<double> pi =
        markov::stationary_distribution(m.environment).pi;
    const diffusion::AsymptoticMoments moments = diffusion::asymptotic_moments(m);
    const diffusion::DiffusionSpec spec =
        diffusion::covariance(moments, m, diffusion::CovarianceRegime::Combined);

    const double horizon = static_cast<double>(scale) * at_time;
    const double root = std::sqrt(static_cast<double>(scale));
    const int mc = m.components;
    std::vector<double> sum(static_cast<std::size_t>(mc), 0.0);
    std::vector<double> sum_sq(static_cast<std::size_t>(mc * mc), 0.0);
    std::vector<double> y(static_cast<std::size_t>(mc), 0.0);

    for (std::uint64_t p = 0; p < config.mc.paths; ++p) {
        numerics::RngStream rng(config.mc.seed, p);
        // Stationary start: the scaled limit is stated for an environment
        // already in equilibrium.
        const double target = rng.next_uniform();
        int state0 = m.environment.states - 1;
        double cumulative = 0.0;
        for (int j = 0; j < m.environment.states; ++j) {
            cumulative += pi[j];
            if (target <= cumulative) {
                state0 = j;
                break;
            }
        }
        const markov::EnvironmentPath path =
            markov::sample_environment_path(m.environment, state0, horizon, rng);
        const std::size_t segments = path.times.size();
        for (int i = 0; i < mc; ++i) {
            double total = 0.0;
            for (std::size_t k = 0; k < segments; ++k) {
                const double seg_end =
                    k + 1 < segments ? path.times[k + 1] : horizon;
                const double lambda = m.arrival_rate(i, path.states[k]);
                if (!(lambda > 0.0)) {
                    continue;
                }
                const model::ClaimDistribution& dist = m.claim(i, path.states[k]);
                double t = path.times[k] + rng.next_exponential(1.0 / lambda);
                while (t < seg_end) {
                    total += draw_claim_size(dist, rng);
                    t += rng.next_exponential(1.0 / lambda);
                }
            }
            y[i] = (total - moments.mean_claim_rate[i] * horizon) / root;
        }
        for (int i = 0; i < mc; ++i) {
            sum[i] += y[i];
            for (int k = 0; k < mc; ++k) {
                sum_sq[i * mc + k] += y[i] * y[k];
            }
        }
    }

    const double n = static_cast<double>(config.mc.paths);
    out << "scaled claim flow covariance check: scale=" << scale
        << " time=" << format_number(at_time) << " paths=" << config.mc.paths
        << " seed=" << config.mc.seed << "\n";
    out << "entry,empirical,limit,difference\n";
    double worst = 0.0;
    for (int i = 0; i < mc; ++i) {
        for (int k = i; k < mc; ++k) {
            const double mean_i = sum[i] / n;
            const double mean_k = sum[k] / n;
            const double empirical =
                (sum_sq[i * mc + k] - n * mean_i * mean_k) / (n - 1.0);
            const double limit = spec.covariance[i * mc + k] * at_time;
            const double difference = empirical - limit;
            worst = std::max(worst, std::abs(difference) /
                                        std::max(std::abs(limit), 1e-12));
            out << (i + 1) << ":" << (k + 1) << ',' << format_number(empirical)
                << ',' << format_number(limit) << ','
                << format_number(difference) << "\n";
        }
    }
    out << "max relative deviation: " << format_number(worst) << "\n";
    return 0;
}

// One summary line per approximation: its largest absolute gap to the Monte
// Carlo column and where on the grid it occurs. Goes to stderr so the CSV on
// stdout stays machine-readable.
void print_compare_summary(const std::vector<ResultRow>& rows,
                           std::ostream& err) {
    struct Column {
        const char* name;
        std::optional<double> ResultRow::*value;
    };
    const Column columns[] = {
        {"diffusion", &ResultRow::diffusion},
        {"single-switch", &ResultRow::single_switch},
        {"independence", &ResultRow::independence},
    };
    for (const Column& column : columns) {
        double worst = -1.0;
        double at = 0.0;
        for (const ResultRow& row : rows) {
            if (!row.mc.has_value() || !(row.*(column.value)).has_value()) {
                continue;
            }
            const double gap = std::abs(*(row.*(column.value)) - *row.mc);
            if (gap > worst) {
                worst = gap;
                at = row.horizon;
            }
        }
        if (worst >= 0.0) {
            err << "compare: max |" << column.name
                << " - mc| = " << format_number(worst)
                << " at T=" << format_number(at) << "\n";
        }
    }
}

// The drift and covariance behind the diffusion numbers, as a one-look
// diagnostic next to the CSV.
void print_covariance_note(const model::RiskModel& m, std::ostream& err) {
    const diffusion::AsymptoticMoments moments = diffusion::asymptotic_moments(m);
    const diffusion::DiffusionSpec spec =
        diffusion::covariance(moments, m, diffusion::CovarianceRegime::Combined);
    err << "diffusion drift:";
    for (double d : spec.drift) {
        err << ' ' << format_number(d);
    }
    err << "\ndiffusion covariance:";
    for (int i = 0; i < spec.components; ++i) {
        err << (i == 0 ? " [" : "; [");
        for (int k = 0; k < spec.components; ++k) {
            err << (k == 0 ? "" : ", ")
                << format_number(spec.covariance[i * spec.components + k]);
        }
        err << ']';
    }
    err << "\n";
}

// Threads resolution order: --threads flag, then [mc] threads, then the
// RUINLAB_THREADS environment variable, then auto (hardware concurrency).
void apply_thread_env(ExperimentConfig& config, bool flag_given) {
    if (flag_given || config.mc.threads != 0) {
        return;
    }
    const char* raw = std::getenv("RUINLAB_THREADS");
    if (raw == nullptr || *raw == '\0') {
        return;
    }
    const std::string value(raw);
    long long threads = 0;
    const auto [ptr, ec] =
        std::from_chars(value.data(), value.data() + value.size(), threads);
    if (ec != std::errc{} || ptr != value.data() + value.size() || threads < 0) {
        fail("bad-env", "RUINLAB_THREADS must be a nonnegative integer, got '" +
                            value + "'");
    }
    config.mc.threads = static_cast<int>(threads);
}

int emit(const ExperimentConfig& config, const std::vector<ResultRow>& rows) {
    if (config.output.empty()) {
        write_csv(rows, std::cout);
        return 0;
    }
    std::ofstream out(config.output);
    if (!out) {
        std::cerr << "ruinlab: cannot open output file: " << config.output
                  << "\n";
        return 2;
    }
    write_csv(rows, out);
    return 0;
}

}  // namespace

int main_entry(int argc, char** argv) {
    CLI::App app{
        "Finite-horizon ruin probabilities of Markov-modulated risk "
        "processes: Monte Carlo, diffusion approximation, and single-switch "
        "approximation"};
    app.name("ruinlab");
    app.require_subcommand(1);

    struct Flags {
        std::string config;
        std::string example;
        std::uint64_t paths = 0;
        std::uint64_t seed = 0;
        double confidence = 0.0;
        int threads = 0;
        std::string output;
        long long scale = 64;
        double time = 1.0;
    } flags;

    auto add_overrides = [&](CLI::App* cmd) {
        cmd->add_option("--paths", flags.paths, "Monte Carlo path count");
        cmd->add_option("--seed", flags.seed, "Monte Carlo seed");
        cmd->add_option("--confidence", flags.confidence,
                        "confidence level in (0, 1)")
            ->check(CLI::Range(1e-12, 1.0 - 1e-12));
        cmd->add_option("--threads", flags.threads,
                        "worker thread count (0 = auto)")
            ->check(CLI::NonNegativeNumber);
        cmd->add_option("--output,-o", flags.output,
                        "CSV output path (default: stdout)");
    };

    CLI::App* estimate =
        app.add_subcommand("estimate", "Monte Carlo estimate over the grid");
    estimate->add_option("config", flags.config, "experiment configuration file")
        ->required();
    add_overrides(estimate);

    CLI::App* approx_diffusion = app.add_subcommand(
        "approx-diffusion", "diffusion approximation over the grid");
    approx_diffusion
        ->add_option("config", flags.config, "experiment configuration file")
        ->required();
    add_overrides(approx_diffusion);

    CLI::App* approx_switch = app.add_subcommand(
        "approx-switch", "single-switch approximation over the grid");
    approx_switch
        ->add_option("config", flags.config, "experiment configuration file")
        ->required();
    add_overrides(approx_switch);

    CLI::App* compare = app.add_subcommand(
        "compare", "all estimators side by side over the grid");
    compare->add_option("config", flags.config, "experiment configuration file")
        ->required();
    add_overrides(compare);

    CLI::App* reproduce = app.add_subcommand(
        "reproduce", "run a bundled example study (example1, example2, example3)");
    reproduce
        ->add_option("example", flags.example,
                     "bundled study name: example1, example2, or example3")
        ->required()
        ->check(CLI::IsMember({"example1", "example2", "example3"}));
    add_overrides(reproduce);

    CLI::App* fclt = app.add_subcommand(
        "fclt-check",
        "compare the scaled claim flow covariance against its limit");
    fclt->add_option("config", flags.config, "experiment configuration file")
        ->required();
    fclt->add_option("--scale", flags.scale, "scaling parameter n")
        ->check(CLI::PositiveNumber);
    fclt->add_option("--time", flags.time, "observation time of the scaled flow")
        ->check(CLI::PositiveNumber);
    add_overrides(fclt);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            return app.exit(e);
        }
        app.exit(e);
        return 2;
    }

    CLI::App* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();

    try {
        ExperimentConfig config;
        if (name == "reproduce") {
            int index = 3;
            if (flags.example == "example1") {
                index = 1;
            } else if (flags.example == "example2") {
                index = 2;
            }
            std::istringstream in(builtin_example_config(index));
            config = parse_config(in);
        } else {
            config = parse_config_file(flags.config);
        }

        if (sub->count("--paths") > 0) {
            if (flags.paths == 0) {
                fail("bad-value", "--paths: needs at least one path");
            }
            config.mc.paths = flags.paths;
        }
        if (sub->count("--seed") > 0) {
            config.mc.seed = flags.seed;
        }
        if (sub->count("--confidence") > 0) {
            config.mc.confidence = flags.confidence;
        }
        if (sub->count("--threads") > 0) {
            config.mc.threads = flags.threads;
        }
        apply_thread_env(config, sub->count("--threads") > 0);
        if (sub->count("--output") > 0) {
            config.output = flags.output;
        }

        if (name == "fclt-check") {
            if (config.output.empty()) {
                return run_fclt_check(config, flags.scale, flags.time,
                                      std::cout);
            }
            std::ofstream out(config.output);
            if (!out) {
                std::cerr << "ruinlab: cannot open output file: "
                          << config.output << "\n";
                return 2;
            }
            return run_fclt_check(config, flags.scale, flags.time, out);
        }

        if (name == "estimate") {
            config.methods = {"mc"};
        } else if (name == "approx-diffusion") {
            config.methods = {"diffusion"};
        } else if (name == "approx-switch") {
            config.methods = {"single-switch"};
        } else if (name == "compare") {
            config.methods = {"mc", "diffusion", "single-switch", "independence"};
        }
        // reproduce keeps the methods listed in the bundled configuration.

        if (name == "approx-diffusion") {
            print_covariance_note(config.model, std::cerr);
        }
        const std::vector<ResultRow> rows = run(config);
        const int status = emit(config, rows);
        if (status == 0 && (name == "compare" || name == "reproduce")) {
            print_compare_summary(rows, std::cerr);
        }
        return status;
    } catch (const ConfigError& e) {
        std::cerr << "ruinlab: configuration error [" << e.code
                  << "]: " << e.message << "\n";
        return 2;
    } catch (const EstimatorError& e) {
        std::cerr << "ruinlab: method " << e.method
                  << " failed at T=" << format_number(e.horizon) << ": "
                  << e.message << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "ruinlab: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace ruinlab::cli
