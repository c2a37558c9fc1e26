/**
 * Headless scripted session: connects to a play endpoint, toggles
 * recording, and holds ArrowRight through synthesized key events until one
 * episode completes, then exits.  Exercises the full browser protocol
 * without a browser.
 *
 * Usage: node dist/autoplay.js <host> <port> [max-decisions]
 */
import { PlaySession } from "./session.js";
import type { ActionSpec, Snapshot } from "./types.js";
import { WsTextClient } from "./wsclient.js";

const host = process.argv[2];
const port = Number(process.argv[3]);
if (!host || !port) {
  console.error("usage: autoplay <host> <port> [max-decisions]");
  process.exit(2);
}
const maxDecisions = Number(process.argv[4] ?? 64);

const spec: ActionSpec = { kind: "discrete", branches: [3] };
let sawEpisodeEnd = false;

const client = new WsTextClient(host, port, "/play", {
  onOpen: () => {
    session.keyDown("r"); // toggle recording before the first reply
    session.keyDown("ArrowRight");
  },
  onMessage: (text) => session.handleMessage(text),
  onClose: (reason) => {
    if (!sawEpisodeEnd) {
      console.error(`closed before episode end: ${reason}`);
      process.exit(1);
    }
  },
});

const session = new PlaySession(spec, { send: (d) => client.sendText(d) },
                                (snapshot: Snapshot) => {
  // an episode_step back at 0 after progress means the recorded episode
  // finished and the demo was flushed server-side
  if (session.received > 1 && snapshot.hud.episode_step === 0) {
    sawEpisodeEnd = true;
  }
  if (sawEpisodeEnd || session.received >= maxDecisions) {
    console.log(JSON.stringify({
      decisions: session.sent,
      episodeEnded: sawEpisodeEnd,
      finalReward: snapshot.hud.cumulative_reward,
    }));
    client.close();
    process.exit(sawEpisodeEnd ? 0 : 1);
  }
});
