// Bundled reference datasets, addressable from the CLI as @endometrial
// and @foodexp. Plain CSV text, identical to the files under data/.
//
// endometrial: n=79 study of endometrial cancer histology. Columns:
//   NV (neovasculation indicator), PI (pulsatility index),
//   EH (endometrium height), HG (histology grade, response). The 13
//   records with NV=1 all have HG=1, producing quasi-complete separation.
// foodexp: n=38 household budget survey. Columns: food (expenditure),
//   income, persons; the modelled response is the share food/income.
#pragma once

#include <string_view>

#include "medscore/csv.hpp"

namespace medscore {

inline constexpr std::string_view endometrial_csv =
    "NV,PI,EH,HG\n"
    "0,13,1.64,0\n"
    "0,16,2.26,0\n"
    "0,8,3.14,0\n"
    "0,34,2.68,0\n"
    "0,20,1.28,0\n"
    "0,5,2.31,0\n"
    "0,17,1.8,0\n"
    "0,10,1.68,0\n"
    "0,26,1.56,0\n"
    "0,17,2.31,0\n"
    "0,8,2.01,0\n"
    "0,7,1.89,0\n"
    "0,20,3.15,0\n"
    "0,10,1.23,0\n"
    "0,18,1.27,0\n"
    "0,16,1.76,0\n"
    "0,18,2.0,0\n"
    "0,8,2.64,1\n"
    "0,29,0.88,1\n"
    "0,12,1.27,1\n"
    "0,20,1.37,1\n"
    "1,38,0.97,1\n"
    "1,22,1.14,1\n"
    "1,7,0.88,1\n"
    "1,25,0.91,1\n"
    "1,15,0.58,1\n"
    "0,7,0.97,1\n"
    "0,28,1.5,0\n"
    "0,11,1.33,0\n"
    "0,19,2.37,0\n"
    "0,10,1.82,0\n"
    "0,10,3.13,0\n"
    "0,18,1.31,0\n"
    "0,14,1.92,0\n"
    "0,21,1.64,0\n"
    "0,11,2.01,0\n"
    "0,17,1.88,0\n"
    "0,25,1.93,0\n"
    "0,16,2.11,0\n"
    "0,19,1.29,0\n"
    "0,15,1.72,0\n"
    "0,33,0.75,0\n"
    "0,24,1.92,0\n"
    "0,48,1.84,1\n"
    "0,12,1.11,1\n"
    "0,19,1.61,1\n"
    "0,2,1.18,1\n"
    "1,22,1.44,1\n"
    "1,40,1.18,1\n"
    "1,5,0.93,1\n"
    "1,0,1.17,1\n"
    "0,21,1.19,1\n"
    "0,15,1.06,1\n"
    "0,29,2.02,0\n"
    "0,15,2.29,0\n"
    "0,12,2.33,0\n"
    "0,3,2.9,0\n"
    "0,20,1.7,0\n"
    "0,23,1.41,0\n"
    "0,12,2.25,0\n"
    "0,22,1.54,0\n"
    "0,42,1.97,0\n"
    "0,15,1.75,0\n"
    "0,13,2.16,0\n"
    "0,14,2.57,0\n"
    "0,19,1.37,0\n"
    "0,12,3.61,0\n"
    "0,13,2.04,0\n"
    "0,10,2.17,0\n"
    "0,12,1.69,1\n"
    "1,49,0.27,1\n"
    "0,6,1.84,1\n"
    "0,5,1.3,1\n"
    "0,17,0.96,1\n"
    "1,11,1.01,1\n"
    "1,21,0.98,1\n"
    "0,5,0.35,1\n"
    "1,19,1.02,1\n"
    "0,33,0.85,1\n";

inline constexpr std::string_view foodexp_csv =
    "food,income,persons\n"
    "15.998,62.476,1\n"
    "16.652,82.304,5\n"
    "21.741,74.679,3\n"
    "7.431,39.151,3\n"
    "10.481,64.724,5\n"
    "13.548,36.786,3\n"
    "23.256,83.052,4\n"
    "17.976,86.935,1\n"
    "14.161,88.233,2\n"
    "8.825,38.695,2\n"
    "14.184,73.831,7\n"
    "19.604,77.122,3\n"
    "13.728,45.519,2\n"
    "21.141,82.251,2\n"
    "17.446,59.862,3\n"
    "9.629,26.563,3\n"
    "14.005,61.818,2\n"
    "9.16,29.682,1\n"
    "18.831,50.825,5\n"
    "7.641,71.062,4\n"
    "13.882,41.99,4\n"
    "9.67,37.324,3\n"
    "21.604,86.352,5\n"
    "10.866,45.506,2\n"
    "28.98,69.929,6\n"
    "10.882,61.041,2\n"
    "18.561,82.469,1\n"
    "11.629,44.208,2\n"
    "18.067,49.467,5\n"
    "14.539,25.905,5\n"
    "19.192,79.178,5\n"
    "25.918,75.811,3\n"
    "28.833,82.718,6\n"
    "15.869,48.311,4\n"
    "14.91,42.494,5\n"
    "9.55,40.573,4\n"
    "23.066,44.872,6\n"
    "14.751,27.167,7\n";

inline CsvTable bundled_dataset(const std::string& name) {
    if (name == "endometrial")
        return parse_csv_string(std::string(endometrial_csv), "@endometrial");
    if (name == "foodexp")
        return parse_csv_string(std::string(foodexp_csv), "@foodexp");
    throw CsvError("unknown bundled dataset '" + name +
                   "' (available: endometrial, foodexp)");
}

}  // namespace medscore
