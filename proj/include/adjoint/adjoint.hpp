#pragma once

#include "adjoint/cli.hpp"
#include "adjoint/derivation.hpp"
#include "adjoint/dynamics.hpp"
#include "adjoint/epistemic.hpp"
#include "adjoint/error.hpp"
#include "adjoint/lattice.hpp"
#include "adjoint/operators.hpp"
#include "adjoint/quantale.hpp"
#include "adjoint/scenario.hpp"
#include "adjoint/semantics.hpp"
#include "adjoint/term.hpp"
