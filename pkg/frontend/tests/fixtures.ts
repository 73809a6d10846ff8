import type { Nonconformity, Rating, RiskEntry } from "../src/types";

export function rating(band: string, decisionBasis: string, timelineMonths: number): Rating {
  return { band, decisionBasis, timelineMonths };
}

export function riskEntry(
  id: string,
  impact: number,
  likelihood: number,
  baseScore: number,
  band: Rating
): RiskEntry {
  return {
    id,
    cycleId: "cy-1",
    assetId: `as-${id}`,
    threatId: "th-1",
    vulnerabilityId: "vu-1",
    impact,
    likelihood,
    businessLoss: impact,
    baseScore,
    baseRating: band,
    createdAt: "2024-02-08T09:00:00Z",
  };
}

export function nonconformity(
  id: string,
  currentStep: number,
  deadline: string,
  status: Nonconformity["status"] = "Open"
): Nonconformity {
  const record: Nonconformity = {
    id,
    description: `Issue ${id}`,
    source: "InternalAudit",
    reportedBy: { id: "ca", name: "ca", role: "CorrectiveActionsAdmin" },
    reportedAt: "2024-01-01T08:00:00Z",
    deadline,
    currentStep,
    steps: [],
    extensions: [],
    status,
  };
  if (status === "Dispensed") {
    record.dispensation = {
      approver: { id: "tm", name: "tm", role: "TopManagement" },
      at: "2024-02-01T08:00:00Z",
      reason: "Superseded by a vendor migration",
    };
  }
  return record;
}
