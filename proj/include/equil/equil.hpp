// Copyright 2026 The equil Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef EQUIL_EQUIL_HPP_
#define EQUIL_EQUIL_HPP_

#include "algorithms.hpp"
#include "corpus.hpp"
#include "diagnostics.hpp"
#include "error.hpp"
#include "exact.hpp"
#include "experiment.hpp"
#include "io.hpp"
#include "operator.hpp"
#include "random.hpp"
#include "sparse_matrix.hpp"
#include "stochastic.hpp"
#include "structure.hpp"

#endif // EQUIL_EQUIL_HPP_
