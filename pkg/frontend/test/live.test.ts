import { describe, expect, it, vi } from "vitest";

import { Client } from "../src/api";
import { WizardStore } from "../src/store";

// Opt-in end-to-end run against a real service:
//   OCELFORGE_BASE=http://127.0.0.1:8800 OCELFORGE_SNAPSHOT=/path/to/snapshot npx vitest run test/live.test.ts
const BASE = process.env.OCELFORGE_BASE ?? "";
const SNAPSHOT = process.env.OCELFORGE_SNAPSHOT ?? "";

describe.skipIf(!BASE || !SNAPSHOT)("wizard against a running service", () => {
  it(
    "walks the full flow and downloads the same bytes the raw endpoint serves",
    async () => {
      const api = new Client(BASE);
      const store = new WizardStore(api);

      await store.connect(SNAPSHOT);
      expect(store.state.error).toBeNull();
      expect(store.state.step).toBe("scope");
      expect(store.state.master).toBe("EKKO");

      store.applyPreset("P2P");
      for (const extra of ["CDHDR", "CDPOS", "VBFA"]) {
        store.setChecked(extra, true);
      }
      await store.buildGraph();
      expect(store.state.error).toBeNull();
      const names = store.state.gor!.nodes.map((n) => n.name);
      expect(names).toContain("BKPF");
      expect(names).toContain("CDPOS");

      await store.goto("classify");
      expect(store.state.classification!.categories.EKKO.value).toBe("record");

      await store.goto("plan");
      await store.buildPlan();
      expect(store.state.plan).not.toBeNull();

      await store.startExtraction();
      await vi.waitFor(() => expect(store.state.runState).toBe("done"), {
        timeout: 45_000,
        interval: 500,
      });

      const direct = await api.ocel(store.state.session!.id);
      expect(store.state.ocelBytes).not.toBeNull();
      expect(store.state.ocelBytes!.length).toBe(direct.length);
      expect(Buffer.from(store.state.ocelBytes!).equals(Buffer.from(direct))).toBe(true);

      expect(store.state.objectTypes.length).toBeGreaterThan(0);
      await store.runFlatten();
      expect(store.state.flattenResult!.cases).toBeGreaterThan(0);
    },
    60_000,
  );
});
