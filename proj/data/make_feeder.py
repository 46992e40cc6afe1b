#!/usr/bin/env python3
"""Generates the synthetic 76-bus radial feeder (data/network76.json) and its
daily load profiles (data/loads76.csv): 76 buses, 75 branches, 52 loads
aggregated onto 28 nodes, 24 hourly steps. Deterministic."""
import json
import random

random.seed(20240423)

N_BUS = 76
N_LOAD_NODES = 28
N_LOADS = 52
T = 24

# Radial tree: four feeders leaving the slack, each mostly a chain with taps.
parent = [None] * N_BUS
feeder_roots = [1, 2, 3, 4]
for r in feeder_roots:
    parent[r] = 0
chains = {r: [r] for r in feeder_roots}
for b in range(5, N_BUS):
    r = feeder_roots[b % 4]
    chain = chains[r]
    if random.random() < 0.75:
        parent[b] = chain[-1]   # extend the chain
        chain.append(b)
    else:
        parent[b] = random.choice(chain)  # lateral tap

branches = []
for b in range(1, N_BUS):
    r = round(random.uniform(0.002, 0.008), 6)
    x = round(random.uniform(0.0015, 0.006), 6)
    branches.append({"from": parent[b], "to": b, "r_pu": r, "x_pu": x})

buses = [{"id": i, "name": f"bus{i:02d}", "slack": i == 0} for i in range(N_BUS)]

net = {
    "buses": buses,
    "branches": branches,
    "base": {"v_base_kv": 0.4, "s_base_kva": 250.0},
    "slack_voltage_pu": 1.0,
}
with open("network76.json", "w") as f:
    json.dump(net, f, indent=2)
    f.write("\n")

# Hourly shape with a morning bump and an evening peak.
shape = [0.45, 0.40, 0.38, 0.37, 0.38, 0.45, 0.60, 0.75, 0.70, 0.62, 0.58,
         0.55, 0.56, 0.55, 0.52, 0.55, 0.65, 0.85, 1.00, 0.98, 0.90, 0.78,
         0.62, 0.50]

# Prefer deep nodes so the evening peak pulls some voltages below the green band.
depth = [0] * N_BUS
for b in range(1, N_BUS):
    depth[b] = depth[parent[b]] + 1
candidates = sorted(range(1, N_BUS), key=lambda b: -depth[b])
load_nodes = sorted(random.sample(candidates[:45], N_LOAD_NODES))

node_p = {b: [0.0] * T for b in load_nodes}
node_q = {b: [0.0] * T for b in load_nodes}
for k in range(N_LOADS):
    node = load_nodes[k % N_LOAD_NODES]
    peak = random.uniform(0.025, 0.09)     # pu
    pf = random.uniform(0.90, 0.98)
    jitter = [random.uniform(0.9, 1.1) for _ in range(T)]
    for t in range(T):
        p = peak * shape[t] * jitter[t]
        node_p[node][t] += p
        node_q[node][t] += p * (1 / pf**2 - 1) ** 0.5

with open("loads76.csv", "w") as f:
    f.write("bus_id,t,p_pu,q_pu\n")
    for b in load_nodes:
        for t in range(T):
            f.write(f"{b},{t},{node_p[b][t]:.8f},{node_q[b][t]:.8f}\n")

print("nodes with load:", len(load_nodes), "total peak p:",
      round(sum(node_p[b][18] for b in load_nodes), 4))
