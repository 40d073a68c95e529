#pragma once

#include "dsc/boundary.hpp"
#include "dsc/boussinesq.hpp"
#include "dsc/checkpoint.hpp"
#include "dsc/config.hpp"
#include "dsc/cycle.hpp"
#include "dsc/errors.hpp"
#include "dsc/field_store.hpp"
#include "dsc/gradops.hpp"
#include "dsc/hexmesh.hpp"
#include "dsc/mesh_io.hpp"
#include "dsc/output.hpp"
#include "dsc/parallel.hpp"
#include "dsc/pressure.hpp"
#include "dsc/runner.hpp"
#include "dsc/scattering.hpp"
#include "dsc/simulation.hpp"
#include "dsc/vec3.hpp"
