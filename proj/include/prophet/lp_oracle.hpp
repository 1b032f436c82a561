#pragma once

#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "prophet/finite_model.hpp"
#include "prophet/simplex.hpp"

namespace prophet {

class LpSizeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

inline constexpr int lp_max_m = 500;
inline constexpr int lp_max_km = 2000;

enum class LpOrientation { minimize_D, maximize_P };

// Discretization of the k-window program on the grid i/m.
struct DiscretizedLP {
    LpOrientation orientation = LpOrientation::minimize_D;
    WindowPlan plan;
    int m = 0;
    LinearProgram<double> lp;
    std::vector<std::string> variables;
    std::vector<std::string> rows;
};

// Variables d_1..d_k, f_0..f_m; rows (t,i) for t <= k, i <= m, the
// normalization row, then f_{l-1} >= f_l.
DiscretizedLP build_D(const WindowPlan& plan, int m);
// Variables alpha_{t,i}, v, eta_0..eta_{m+1}.
DiscretizedLP build_P(const WindowPlan& plan, int m);

SimplexResult<double> solve(const DiscretizedLP& lp, long iteration_limit = 200000);

// CPLEX LP text layout: objective, "Subject To" rows, bounds, End.
void write_lp_text(std::ostream& os, const DiscretizedLP& lp);

const char* to_string(SimplexStatus s);
nlohmann::json to_json(const SimplexResult<double>& r);

} // namespace prophet
