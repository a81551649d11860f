#pragma once

#include <string>
#include <vector>

namespace magsim {

struct FringeSeries {
    std::vector<double> x;
    std::vector<double> s;
    std::string x_label = "x";
    std::string s_label = "s";

    std::size_t size() const { return x.size(); }
};

}  // namespace magsim
