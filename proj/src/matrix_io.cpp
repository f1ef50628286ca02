#include <ostream>

#include "interlock/csv.hpp"
#include "interlock/dyad_matrix.hpp"

namespace interlock {

void write_matrix_csv(std::ostream& out, const DyadMatrix& matrix) {
    CsvWriter writer(out);
    std::vector<std::string> row;
    row.reserve(matrix.size() + 1);
    row.push_back("");
    for (const auto& id : matrix.ids()) row.push_back(id);
    writer.write_row(row);
    for (std::size_t i = 0; i < matrix.size(); ++i) {
        row.clear();
        row.push_back(matrix.ids()[i]);
        for (std::size_t j = 0; j < matrix.size(); ++j) row.push_back(format_double(matrix(i, j)));
        writer.write_row(row);
    }
}

}  // namespace interlock
