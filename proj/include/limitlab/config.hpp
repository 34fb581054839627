#pragma once

#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

#include "limitlab/complex_io.hpp"
#include "limitlab/fatou.hpp"

namespace limitlab {

/// One run of the CLI, line-oriented key=value form. Serialization is
/// canonical (fixed key order, shortest round-trip numbers), so
/// parse . serialize is the identity on canonical text and every run can echo
/// its exact configuration.
struct RunConfig {
    std::string command;
    std::string poly = "0.1,0,1";          ///< coefficient list a0,a1,...,ad
    cpx a{0.05, 0.0};
    cpx alpha{0.1, 0.0};
    double rho = 1.2;
    int depth = 10;
    GridSpec grid;
    std::uint64_t seed = 1;
    std::optional<double> tol;
    std::string out;
    std::string json_out;

    Polynomial polynomial() const { return Polynomial::parse(poly); }

    std::string serialize() const {
        std::string s;
        s += "command=" + command + "\n";
        s += "poly=" + poly + "\n";
        s += "a=" + format_complex(a) + "\n";
        s += "alpha=" + format_complex(alpha) + "\n";
        s += "rho=" + format_double(rho) + "\n";
        s += "depth=" + std::to_string(depth) + "\n";
        s += "grid=" + grid.str() + "\n";
        s += "seed=" + std::to_string(seed) + "\n";
        if (tol) s += "tol=" + format_double(*tol) + "\n";
        if (!out.empty()) s += "out=" + out + "\n";
        if (!json_out.empty()) s += "json=" + json_out + "\n";
        return s;
    }

    static RunConfig parse(const std::string& text) {
        RunConfig c;
        c.poly.clear();
        std::istringstream in(text);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            auto eq = line.find('=');
            if (eq == std::string::npos)
                throw std::invalid_argument("config: expected key=value, got: " + line);
            std::string key = line.substr(0, eq), value = line.substr(eq + 1);
            if (key == "command") c.command = value;
            else if (key == "poly") c.poly = value;
            else if (key == "a") c.a = parse_complex(value);
            else if (key == "alpha") c.alpha = parse_complex(value);
            else if (key == "rho") c.rho = std::stod(value);
            else if (key == "depth") c.depth = std::stoi(value);
            else if (key == "grid") c.grid = parse_grid(value);
            else if (key == "seed") c.seed = std::stoull(value);
            else if (key == "tol") c.tol = std::stod(value);
            else if (key == "out") c.out = value;
            else if (key == "json") c.json_out = value;
            else throw std::invalid_argument("config: unknown key: " + key);
        }
        return c;
    }

    static GridSpec parse_grid(const std::string& value) {
        GridSpec g;
        std::istringstream in(value);
        std::string item;
        double nums[4];
        for (double& v : nums) {
            if (!std::getline(in, item, ',')) throw std::invalid_argument("config: bad grid: " + value);
            v = std::stod(item);
        }
        g.x0 = nums[0];
        g.x1 = nums[1];
        g.y0 = nums[2];
        g.y1 = nums[3];
        if (!std::getline(in, item, ',')) throw std::invalid_argument("config: bad grid: " + value);
        g.nx = std::stoi(item);
        if (!std::getline(in, item, ',')) throw std::invalid_argument("config: bad grid: " + value);
        g.ny = std::stoi(item);
        return g;
    }
};

} // namespace limitlab
