"""Prepumping with one cavity field, then pumping both, with atoms leaving
the trap.

In the symmetric regime the two transmissions end equal whichever field did
the prepumping.  In the broken regime the prepump picks the winner.  Atom
loss slowly moves the threshold, so a long enough run eventually returns to
the symmetric state.  Times are in ms.

    python demos/03_prepump_and_atom_loss.py
"""
from cavityz2.analysis import final_split_sign, merge_then_separate
from cavityz2.config import merge, preset_document, validate
from cavityz2.meanfield import ProtocolConfig, kappa_time_to_ms, run_protocol


def run(doc):
    c = validate(doc)
    tr = run_protocol(ProtocolConfig(c.params, c.scheme, c.populations, c.prepump_mode, c.prepump_duration,
                                     c.t_end, loss=c.loss, options=c.options, n_samples=c.n_samples,
                                     start_time=c.start_time))
    return tr, c


# %% both regimes, both prepump orders, at fixed atom number
for name in ("fig3a", "fig3b"):
    for mode in ("+", "-"):
        doc = merge(preset_document(name), {"loss": {"enabled": False}})
        doc["init"]["prepump_mode"] = mode
        tr, c = run(doc)
        print(f"{name} at {doc['params']['delta_p_MHz']} MHz, prepump {mode}: "
              f"final I_a = {tr.Ia[-1]:+9.4f}, sign {final_split_sign(tr):+d}")

# %% the same broken-regime run with atom loss
tr, c = run(preset_document("fig3b"))
t_ms = kappa_time_to_ms(tr.times, c.kappa_MHz)
for t, ia, n in list(zip(t_ms, tr.Ia, tr.atom_number))[::60]:
    print(f"  t = {t:5.1f} ms   N = {n:7.0f}   I_a = {ia:+8.3f}")

# %% quench scenario
tr, c = run(preset_document("figS4-quench"))
ms = merge_then_separate(tr, after=c.start_time + c.prepump_duration)
merged = None if ms.merged_at is None else kappa_time_to_ms(ms.merged_at, c.kappa_MHz)
print(f"\nquench preset: powers merge at {merged} ms; largest later split {ms.max_split_after_merge:.1e}")
