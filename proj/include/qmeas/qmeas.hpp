#pragma once

// Everything in one include.

#include "qmeas/check.hpp"
#include "qmeas/eigensolver/brute_force.hpp"
#include "qmeas/eigensolver/continuation.hpp"
#include "qmeas/eigensolver/coupled_system.hpp"
#include "qmeas/errors.hpp"
#include "qmeas/hydrogen.hpp"
#include "qmeas/io/json_io.hpp"
#include "qmeas/numerics/linear_algebra.hpp"
#include "qmeas/numerics/quadrature.hpp"
#include "qmeas/numerics/root_finding.hpp"
#include "qmeas/photon.hpp"
#include "qmeas/quantities.hpp"
#include "qmeas/rates.hpp"
#include "qmeas/repro.hpp"
#include "qmeas/scenario.hpp"
