if (!window.performance || !performance.getEntriesByType) return [];
return performance.getEntriesByType('resource').map(function (e) { return e.name; });
