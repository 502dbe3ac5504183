// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

namespace pvlab {

// self-contained log-log scatter with error bars and a fitted power law
std::string svg_loglog_plot(const std::vector<double>& x,
                            const std::vector<double>& y,
                            const std::vector<double>& yerr, double slope,
                            double intercept, const std::string& title,
                            const std::string& xlabel = "lambda",
                            const std::string& ylabel = "value");

}  // namespace pvlab
