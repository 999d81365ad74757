#pragma once

#include "snspec/closed_forms.hpp"
#include "snspec/gauss_legendre.hpp"
#include "snspec/geometry.hpp"
#include "snspec/harmonic_basis.hpp"
#include "snspec/lemma_integrals.hpp"
#include "snspec/nodal_domains.hpp"
#include "snspec/spectral_analysis.hpp"
#include "snspec/trefftz_solver.hpp"
