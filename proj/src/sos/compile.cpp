// Copyright (c) agcv contributors.
// SPDX-License-Identifier: Apache-2.0
#include "agcv/sos/compile.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "agcv/poly/parse.hpp"
#include "agcv/sdp/eigen.hpp"

namespace agcv::sos {

Polynomial expand_gram(const std::vector<Monomial>& basis, const Eigen::MatrixXd& gram) {
    Polynomial out;
    for (std::size_t i = 0; i < basis.size(); ++i) {
        for (std::size_t j = 0; j < basis.size(); ++j) {
            out.add_term(basis[i] * basis[j], gram(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
        }
    }
    return out;
}

Compiled compile(const SosProgram& program) {
    BackMap map;
    std::size_t nvars = 0;
    for (std::size_t u = 0; u < program.unknowns().size(); ++u) {
        const auto n = program.layouts()[u].num_slots();
        for (std::size_t k = 0; k < n; ++k) {
            map.slot_var[{SlotRef::Owner::Unknown, static_cast<std::uint32_t>(u), static_cast<std::uint32_t>(k)}] =
                nvars++;
        }
    }
    for (std::size_t s = 0; s < program.scalars().size(); ++s) {
        map.slot_var[{SlotRef::Owner::Scalar, static_cast<std::uint32_t>(s), 0}] = nvars++;
    }
    for (const auto& con : program.constraints()) {
        BackMap::ConstraintGram cg;
        cg.basis = constraint_basis(con.variables, con.expression.degree());
        const std::size_t n = cg.basis.size();
        for (std::size_t k = 0; k < n * (n + 1) / 2; ++k) {
            cg.vars.push_back(nvars++);
        }
        map.constraints.push_back(std::move(cg));
    }

    sdp::SdpProblem problem(nvars);
    for (const auto& [scalar, weight] : program.objective()) {
        problem.set_cost(map.slot_var.at({SlotRef::Owner::Scalar, scalar, 0}), weight);
    }

    for (std::size_t u = 0; u < program.unknowns().size(); ++u) {
        const auto& layout = program.layouts()[u];
        if (program.unknowns()[u].kind == Kind::Free) {
            map.unknown_block.push_back(sdp::SdpProblem::npos);
            continue;
        }
        const std::size_t b = problem.add_block(static_cast<Eigen::Index>(layout.basis.size()));
        for (std::size_t k = 0; k < layout.pairs.size(); ++k) {
            const auto [i, j] = layout.pairs[k];
            const std::size_t var = map.slot_var.at(
                {SlotRef::Owner::Unknown, static_cast<std::uint32_t>(u), static_cast<std::uint32_t>(k)});
            problem.add_entry(b, var, static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j), 1.0);
        }
        map.unknown_block.push_back(b);
    }
    for (std::size_t s = 0; s < program.scalars().size(); ++s) {
        if (program.scalars()[s].sign == Sign::Nonnegative) {
            const std::size_t b = problem.add_block(1);
            problem.add_entry(b, map.slot_var.at({SlotRef::Owner::Scalar, static_cast<std::uint32_t>(s), 0}), 0, 0,
                              1.0);
        }
    }

    for (std::size_t c = 0; c < program.constraints().size(); ++c) {
        const auto& con = program.constraints()[c];
        auto& cg = map.constraints[c];
        const std::size_t n = cg.basis.size();
        cg.block = problem.add_block(static_cast<Eigen::Index>(n));

        // coefficient of each monomial as a sparse row over SDP variables
        std::map<Monomial, std::map<std::size_t, double>> rows;
        std::map<Monomial, double> rhs;
        for (const auto& [m, coef] : con.expression.known().terms()) {
            rhs[m] -= coef;
            rows[m];
        }
        for (const auto& [ref, img] : con.expression.slots()) {
            const std::size_t var = map.slot_var.at(ref);
            for (const auto& [m, coef] : img.terms()) {
                rows[m][var] += coef;
            }
        }
        std::size_t k = 0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i; j < n; ++j, ++k) {
                const std::size_t var = cg.vars[k];
                problem.add_entry(cg.block, var, static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j), 1.0);
                rows[cg.basis[i] * cg.basis[j]][var] -= i == j ? 1.0 : 2.0;
            }
        }
        for (const auto& [m, row] : rows) {
            Eigen::VectorXd dense = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(nvars));
            bool any = false;
            for (const auto& [var, coef] : row) {
                dense(static_cast<Eigen::Index>(var)) = coef;
                any = any || coef != 0.0;
            }
            const double b = rhs.contains(m) ? rhs.at(m) : 0.0;
            if (!any && b == 0.0) {
                continue;
            }
            problem.add_equality(dense, b);
            ++cg.equalities;
        }
    }
    return {std::move(problem), std::move(map)};
}

ProgramResult extract(const SosProgram& program, const Compiled& compiled, const sdp::SdpSolution& solution,
                      const ExtractSettings& settings) {
    ProgramResult result;
    result.status = solution.status;
    result.iterations = solution.iterations;
    if (!result.feasible()) {
        return result;
    }
    Extraction& ex = result.extraction;
    const Eigen::VectorXd& y = solution.y;
    for (const auto& [ref, var] : compiled.map.slot_var) {
        ex.slot_values[ref] = y(static_cast<Eigen::Index>(var));
    }
    for (std::size_t u = 0; u < program.unknowns().size(); ++u) {
        const auto& unk = program.unknowns()[u];
        const auto& layout = program.layouts()[u];
        Polynomial p;
        for (std::size_t k = 0; k < layout.num_slots(); ++k) {
            const double v =
                ex.slot_values.at({SlotRef::Owner::Unknown, static_cast<std::uint32_t>(u), static_cast<std::uint32_t>(k)});
            if (unk.kind == Kind::Free) {
                p.add_term(layout.basis[k], v);
            } else {
                const auto [i, j] = layout.pairs[k];
                p.add_term(layout.basis[i] * layout.basis[j], i == j ? v : 2.0 * v);
            }
        }
        if (unk.kind == Kind::Sos) {
            const auto n = static_cast<Eigen::Index>(layout.basis.size());
            GramEvidence ev;
            ev.label = unk.name;
            ev.basis = layout.basis;
            ev.gram = Eigen::MatrixXd::Zero(n, n);
            for (std::size_t k = 0; k < layout.num_slots(); ++k) {
                const auto [i, j] = layout.pairs[k];
                const double v = ex.slot_values.at(
                    {SlotRef::Owner::Unknown, static_cast<std::uint32_t>(u), static_cast<std::uint32_t>(k)});
                ev.gram(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
                ev.gram(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
            }
            ev.min_eigenvalue = n > 0 ? sdp::min_eigenvalue(ev.gram) : 0.0;
            ex.unknown_grams.push_back(std::move(ev));
        }
        ex.polynomials[unk.name] = std::move(p);
    }
    for (std::size_t s = 0; s < program.scalars().size(); ++s) {
        ex.scalars[program.scalars()[s].name] = ex.slot_values.at({SlotRef::Owner::Scalar, static_cast<std::uint32_t>(s), 0});
    }

    bool ok = solution.min_block_eigenvalue >= -settings.psd_tol;
    for (std::size_t c = 0; c < program.constraints().size(); ++c) {
        const auto& con = program.constraints()[c];
        const auto& cg = compiled.map.constraints[c];
        const auto n = static_cast<Eigen::Index>(cg.basis.size());
        GramEvidence ev;
        ev.label = con.label;
        ev.basis = cg.basis;
        ev.gram = Eigen::MatrixXd::Zero(n, n);
        std::size_t k = 0;
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = i; j < n; ++j, ++k) {
                const double v = y(static_cast<Eigen::Index>(cg.vars[k]));
                ev.gram(i, j) = v;
                ev.gram(j, i) = v;
            }
        }
        const Polynomial lhs = con.expression.value(ex.slot_values);
        ev.residual = max_coefficient_difference(lhs, expand_gram(cg.basis, ev.gram));
        ev.min_eigenvalue = sdp::min_eigenvalue(ev.gram);
        ex.max_residual = std::max(ex.max_residual, ev.residual);
        ok = ok && ev.residual <= settings.residual_tol && ev.min_eigenvalue >= -settings.psd_tol;
        ex.constraints.push_back(std::move(ev));
    }
    if (!ok) {
        result.status = sdp::Status::NumericalFailure;
    }
    return result;
}

ProgramResult solve(const SosProgram& program, const sdp::SolverSettings& solver, const ExtractSettings& settings) {
    const Compiled compiled = compile(program);
    const sdp::SdpSolution sol = sdp::solve(compiled.problem, solver);
    return extract(program, compiled, sol, settings);
}

std::string dump(const SosProgram& program, const Compiled& compiled, const VariableTable& vars) {
    std::ostringstream os;
    os << "sdp variables " << compiled.problem.num_variables() << ", blocks " << compiled.problem.blocks().size()
       << ", equalities " << compiled.problem.equalities().size() << "\n";
    for (std::size_t u = 0; u < program.unknowns().size(); ++u) {
        const auto& unk = program.unknowns()[u];
        os << "unknown " << unk.name << (unk.kind == Kind::Sos ? " sos" : " free") << " degree " << unk.degree
           << " slots " << program.layouts()[u].num_slots() << "\n";
    }
    for (std::size_t c = 0; c < program.constraints().size(); ++c) {
        const auto& con = program.constraints()[c];
        const auto& cg = compiled.map.constraints[c];
        os << "constraint " << con.label << " degree " << con.expression.degree() << " block " << cg.basis.size()
           << " equalities " << cg.equalities << " basis [";
        for (std::size_t i = 0; i < cg.basis.size(); ++i) {
            os << (i ? ", " : "") << to_string(Polynomial(cg.basis[i]), vars);
        }
        os << "]\n";
    }
    return os.str();
}

} // namespace agcv::sos
